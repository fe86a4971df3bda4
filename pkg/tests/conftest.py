import pathlib
import sys

# Oracle helpers live beside the tests, not in the installed package.
sys.path.insert(0, str(pathlib.Path(__file__).parent))
