from .numbers import *
from .sequence import *
from .system import *
from .config import *
from .report import *
