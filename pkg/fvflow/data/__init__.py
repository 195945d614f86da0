from .config import *
from .mesh import *
from .profiles import *
