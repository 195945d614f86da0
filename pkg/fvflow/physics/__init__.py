from .gas import *
from .linear import *
