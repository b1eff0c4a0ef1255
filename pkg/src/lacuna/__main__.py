import sys
from lacuna import scripts

if __name__ == "__main__":
    sys.exit(scripts.main(sys.argv[1:]))
