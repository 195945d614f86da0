from .problems import *
from .integrator import *
from .run import *
from .check import *
