from .gradient import *
from .limiters import *
