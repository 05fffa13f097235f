"""
재분배 플래너와 시뮬레이터 전반에서 사용하는 예외 클래스
"""


class ConfigError(ValueError):
    """잘못된 실행 설정 또는 입력 파일"""


class PlanError(ValueError):
    """유효하지 않은 재분배 경로 또는 계획"""


class NumericalError(RuntimeError):
    """수치 계산 실패 (0인 중심 계수, 발산, Cholesky 실패 등)"""


class SimulationError(RuntimeError):
    """논리 랭크 시뮬레이션 중 타일링/데이터 배치 오류"""


class ReconciliationError(RuntimeError):
    """
    이벤트 로그와 성능 모델이 예측한 통신량이 일치하지 않는 경우

    Attributes:
        report: 불일치 위치가 담긴 구조화된 보고서
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


def exit_code(e: Exception) -> int:
    """CLI 종료 코드: 설정/경로 오류 1, 수치 오류 2, 조정 실패 3"""
    if isinstance(e, ReconciliationError):
        return 3
    if isinstance(e, (NumericalError, SimulationError)):
        return 2
    return 1


def http_status(e: Exception) -> int:
    if isinstance(e, ReconciliationError):
        return 409
    if isinstance(e, (NumericalError, SimulationError)):
        return 422
    if isinstance(e, ValueError):
        return 400
    return 500
