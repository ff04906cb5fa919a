"""Optional compiled build of the search kernel.

The package is pure Python and fully functional without compilation. When
Cython and a C toolchain are available, the DFS kernel source
``src/bellsched/engine/_search.py`` is copied to ``_search_c.py`` and compiled
as ``bellsched.engine._search_c``; ``bellsched.engine`` prefers the compiled
module at import time and silently falls back to the pure one. Any failure
here must leave the install working, so everything is wrapped defensively.
"""

import os
import shutil

from setuptools import setup

# setuptools insists on /-separated paths relative to this file
_SRC = "src/bellsched/engine/_search.py"
_TWIN = "src/bellsched/engine/_search_c.py"


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        shutil.copyfile(os.path.join(here, _SRC), os.path.join(here, _TWIN))
        old = os.getcwd()
        os.chdir(here)
        try:
            return cythonize(
                [_TWIN],
                language_level=3,
                compiler_directives={
                    "boundscheck": False,
                    "wraparound": False,
                    "cdivision": True,
                    "initializedcheck": False,
                },
                quiet=True,
            )
        finally:
            os.chdir(old)
    except Exception:
        return []


setup(ext_modules=_extensions())
