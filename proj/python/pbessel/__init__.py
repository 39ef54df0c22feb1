"""Forward and inverse spectral toolkit for the perturbed Bessel operator
-f'' + l(l+1)/x^2 f + q f on (0,1).

Thin re-export of the compiled extension.  The relative import covers the
installed package layout; the plain import covers a build tree where the
extension sits on PYTHONPATH.
"""

try:
    from ._pbessel import *  # noqa: F401,F403
    from ._pbessel import __doc__ as _core_doc  # noqa: F401
except ImportError:  # build-tree layout
    from _pbessel import *  # noqa: F401,F403

__version__ = "0.1.0"
