from .scatter import *
