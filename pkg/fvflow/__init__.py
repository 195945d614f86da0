from . import physics
from . import fluxes
from . import reconstruction
from . import data
from . import solver
from . import utils

__version__ = '0.1.0'
