from .roe import *
from .boundary import *
