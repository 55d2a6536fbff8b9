"""Exception hierarchy. Every error carries a short machine-readable code."""


class QuasirandomError(Exception):
    code = "E_GENERIC"

    def __str__(self):
        return f"{self.code}: {super().__str__()}"


class DescriptorError(QuasirandomError, ValueError):
    code = "E_DESCRIPTOR"


class GroupTableError(QuasirandomError, ValueError):
    code = "E_TABLE"


class CapExceededError(QuasirandomError):
    code = "E_CAP"


class InputError(QuasirandomError, ValueError):
    code = "E_INPUT"


class ConvergenceError(QuasirandomError, RuntimeError):
    code = "E_CONVERGENCE"


class ModulusSearchError(QuasirandomError, RuntimeError):
    code = "E_MODULUS"


class InadmissibleWordError(InputError):
    code = "E_WORD"
