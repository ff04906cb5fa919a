"""Stand-in for the ``cython`` module when it is not installed.

The search kernel is written in Cython's pure Python mode: the same source
compiles to C when Cython is available and runs unmodified otherwise. When
neither the compiled twin nor the cython package exists, this shim supplies
just enough of the ``cython`` surface (no-op decorators, placeholder types)
for the kernel to run as ordinary Python.
"""


class _Type:
    def __getitem__(self, _item):
        return self

    def __call__(self, *_args, **_kwargs):
        return None


compiled = False

int = _Type()  # noqa: A001 - mirrors the cython module's attribute names
long = _Type()
longlong = _Type()
double = _Type()
bint = _Type()


def _identity(obj):
    return obj


def _identity_factory(*_args, **_kwargs):
    return _identity


cclass = _identity
cfunc = _identity
ccall = _identity
inline = _identity
boundscheck = _identity_factory
wraparound = _identity_factory
cdivision = _identity_factory
exceptval = _identity_factory
locals = _identity_factory  # noqa: A001
