"""Critical Young functions of p-Lévy kernels, Orlicz norms, nonlocal
seminorms and verification of the associated Sobolev-type inequalities."""
from .corpus import *  # noqa: F401,F403
from .estimators import *  # noqa: F401,F403
from .fields import *  # noqa: F401,F403
from .kernels import *  # noqa: F401,F403
from .levelset import *  # noqa: F401,F403
from .orlicz import *  # noqa: F401,F403
from .verify import *  # noqa: F401,F403
from .young import *  # noqa: F401,F403

__version__ = "0.1.0"
