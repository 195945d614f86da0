from .logging import *
from .misc import *
from .io import *
