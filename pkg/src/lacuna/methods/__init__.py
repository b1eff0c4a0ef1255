import typing as T

import pydantic as pdt

from lacuna.core.enums import ImputationMethod
from lacuna.methods.base import ClassificationMethod, ClusteringMethod, Method
from lacuna.methods.classification import (
    KNNAWPD,
    KNNFWPD,
    KNNPDM,
    KNNSDM,
    ImputedKNN,
)
from lacuna.methods.clustering import (
    ImputedKMeans,
    KMeansFWPD,
    KMeansPPAWPD,
    ScalableAWPD,
)

ClusteringMethodKind = T.Union[KMeansPPAWPD, ScalableAWPD, KMeansFWPD, ImputedKMeans]

ClassificationMethodKind = T.Union[KNNAWPD, KNNFWPD, KNNPDM, KNNSDM, ImputedKNN]

MethodKind = T.Annotated[
    T.Union[ClusteringMethodKind, ClassificationMethodKind],
    pdt.Field(discriminator="KIND"),
]

METHOD_ADAPTER = pdt.TypeAdapter(MethodKind)

# method id -> (class, fixed options)
REGISTRY: dict[str, tuple[type[Method], dict[str, T.Any]]] = {
    "kmpp-awpd": (KMeansPPAWPD, {}),
    "scalable-awpd": (ScalableAWPD, {}),
    "kmeans-fwpd": (KMeansFWPD, {}),
    "kmeans-euclid-after-zi": (ImputedKMeans, {"imputation": ImputationMethod.ZERO}),
    "kmeans-euclid-after-mi": (ImputedKMeans, {"imputation": ImputationMethod.MEAN}),
    "kmeans-euclid-after-knni": (ImputedKMeans, {"imputation": ImputationMethod.KNN}),
    "knn-awpd": (KNNAWPD, {}),
    "knn-fwpd": (KNNFWPD, {}),
    "knn-pdm": (KNNPDM, {}),
    "knn-sdm": (KNNSDM, {}),
    "knn-euclid-after-zi": (ImputedKNN, {"imputation": ImputationMethod.ZERO}),
    "knn-euclid-after-mi": (ImputedKNN, {"imputation": ImputationMethod.MEAN}),
    "knn-euclid-after-knni": (ImputedKNN, {"imputation": ImputationMethod.KNN}),
}

ALIASES: dict[str, str] = {
    "zi": "kmeans-euclid-after-zi",
    "mi": "kmeans-euclid-after-mi",
    "knni": "kmeans-euclid-after-knni",
}


def canonical_id(method_id: str) -> str:
    """Resolve aliases and check that the method exists."""
    method_id = ALIASES.get(method_id.strip().lower(), method_id.strip().lower())
    if method_id not in REGISTRY:
        known = ", ".join(sorted([*REGISTRY, *ALIASES]))
        raise ValueError(f"Unknown method '{method_id}' (known: {known})")
    return method_id


def build_method(method_id: str, **options: T.Any) -> MethodKind:
    """
    Instantiate a method from its id; options the method does not declare are dropped,
    so one options mapping can serve every method of an experiment.
    """
    cls, fixed = REGISTRY[canonical_id(method_id)]
    accepted = {
        key: value
        for key, value in options.items()
        if key in cls.model_fields
        and key not in fixed
        and key != "KIND"
        and value is not None
    }
    kind = cls.model_fields["KIND"].default
    return METHOD_ADAPTER.validate_python({"KIND": kind, **accepted, **fixed})


__all__ = [
    "ClassificationMethod",
    "ClassificationMethodKind",
    "ClusteringMethod",
    "ClusteringMethodKind",
    "ImputedKMeans",
    "ImputedKNN",
    "KMeansFWPD",
    "KMeansPPAWPD",
    "KNNAWPD",
    "KNNFWPD",
    "KNNPDM",
    "KNNSDM",
    "Method",
    "MethodKind",
    "ScalableAWPD",
]
