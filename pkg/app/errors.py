from typing import Optional

# КОДЫ ЗАВЕРШЕНИЯ
EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_PRECONDITION = 3


class DiophError(Exception):
    """
    Базовая ошибка. exit_code играет роль HTTP-статуса для CLI
    """
    exit_code = EXIT_FAIL

    def __init__(self, detail: str, **context):
        super().__init__(detail)
        self.detail = detail
        self.context = context

    def to_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "detail": self.detail,
            "exit_code": self.exit_code,
            "context": {k: str(v) for k, v in self.context.items()},
        }


# ПРОВАЛ ПРОВЕРКИ (exit 1)
class VerificationFailed(DiophError):
    pass


class NonSymmetricResult(VerificationFailed):
    pass


class DependentVectors(VerificationFailed):
    pass


class ZeroVector(VerificationFailed):
    pass


class AdmissibilityViolation(VerificationFailed):
    pass


class SeedInvalid(VerificationFailed):
    pass


class CriterionFails(VerificationFailed):
    pass


class FirstCoordinateZero(VerificationFailed):
    pass


class VolumeInequalityFails(VerificationFailed):
    pass


class SearchExhausted(VerificationFailed):
    pass


class NotFound(VerificationFailed):
    pass


class HypothesisFails(VerificationFailed):
    pass


class LinearAlgebraSingular(VerificationFailed):
    pass


class IntegralityFails(VerificationFailed):
    pass


class NoSignChange(VerificationFailed):
    pass


# НЕОПРЕДЕЛЁННЫЙ РЕЗУЛЬТАТ (exit 2)
class InsufficientPrecision(DiophError):
    exit_code = EXIT_INCONCLUSIVE

    def __init__(self, detail: str, index: Optional[int] = None, **context):
        super().__init__(detail, index=index, **context)
        self.index = index


class Inconclusive(InsufficientPrecision):
    pass


class InsufficientTail(InsufficientPrecision):
    pass


class NotConverged(DiophError):
    exit_code = EXIT_INCONCLUSIVE


# НАРУШЕНИЕ ПРЕДУСЛОВИЙ (exit 3)
class PreconditionViolated(DiophError):
    exit_code = EXIT_PRECONDITION


class DomainError(PreconditionViolated):
    pass


class NoSeedFound(PreconditionViolated):
    pass


class PresetNotFound(PreconditionViolated):
    pass
