# core/errors.py
# 예외 계층


class IRPFlowError(Exception):
    """IRPFlow 공통 예외"""
    pass


class InstanceParseError(IRPFlowError, ValueError):
    """인스턴스 파일 형식 오류 (줄 번호 포함)"""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        if line:
            message = f"{line}번째 줄: {message}"
        super().__init__(message)


class InstanceValidationError(IRPFlowError, ValueError):
    """인스턴스 불변식 위반 (필드 이름 포함)"""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class SolutionParseError(IRPFlowError, ValueError):
    """해 파일 형식 오류"""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        if line:
            message = f"{line}번째 줄: {message}"
        super().__init__(message)


class StructuralError(IRPFlowError):
    """해 구조 오류 (존재하지 않는 소매점 등)"""
    pass


class ContractViolationError(IRPFlowError):
    """호출 계약 위반 (오래된 스케줄, 빈 개체군 등)"""
    pass


class OracleBudgetExceeded(IRPFlowError):
    """완전 탐색 예산 초과 - 근사하지 않고 거부"""
    pass


__all__ = [
    'IRPFlowError',
    'InstanceParseError',
    'InstanceValidationError',
    'SolutionParseError',
    'StructuralError',
    'ContractViolationError',
    'OracleBudgetExceeded',
]
