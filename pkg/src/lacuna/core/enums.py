from enum import Enum

# %% MISSINGNESS


class Mechanism(Enum):
    MCAR = "mcar"
    MAR = "mar"
    MNAR1 = "mnar1"
    MNAR2 = "mnar2"


# %% IMPUTATION


class ImputationMethod(Enum):
    ZERO = "zero"
    MEAN = "mean"
    KNN = "knn"


# %% TASKS


class Task(Enum):
    CLUSTERING = "clustering"
    CLASSIFICATION = "classification"
