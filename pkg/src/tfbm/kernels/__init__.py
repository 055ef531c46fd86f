from tfbm.kernels.base import *  # noqa
from tfbm.kernels.curves import *  # noqa
from tfbm.kernels.fou import *  # noqa
from tfbm.kernels.two_index import *  # noqa
from tfbm.kernels.tempering import *  # noqa
from tfbm.kernels.multifractional import *  # noqa
