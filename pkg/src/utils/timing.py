# utils/timing.py
# 실행 시간 측정 및 표시 유틸리티

import time
from typing import Optional


class Stopwatch:
    """경과 시간 측정 (time.perf_counter 기준)"""

    def __init__(self, limit: Optional[float] = None):
        self.limit = limit
        self.start = time.perf_counter()

    def restart(self):
        self.start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def expired(self) -> bool:
        """제한 시간 초과 여부 (limit 가 없으면 항상 False)"""
        return self.limit is not None and self.elapsed >= self.limit

    @property
    def remaining(self) -> Optional[float]:
        if self.limit is None:
            return None
        return max(0.0, self.limit - self.elapsed)


def format_duration(seconds: float) -> str:
    """초를 읽기 쉬운 형식으로 변환 (예: 2.5초)"""
    if seconds < 60:
        return f"{seconds:.1f}초"
    elif seconds < 3600:
        minutes = int(seconds // 60)
        secs = seconds % 60
        return f"{minutes}분 {secs:.1f}초"
    else:
        hours = int(seconds // 3600)
        minutes = int((seconds % 3600) // 60)
        return f"{hours}시간 {minutes}분"


def format_cost(value: float) -> str:
    """비용 표시 (무한대는 'inf')"""
    if value != value:
        return "nan"
    if value in (float('inf'), float('-inf')):
        return "inf" if value > 0 else "-inf"
    return f"{value:.2f}"


def parse_seconds(text: str) -> float:
    """'90', '90s', '2m', '1h' 형식의 시간 문자열을 초로 변환"""
    text = text.strip().lower()
    units = {'s': 1, 'm': 60, 'h': 3600}
    if text and text[-1] in units:
        return float(text[:-1]) * units[text[-1]]
    return float(text)


__all__ = ['Stopwatch', 'format_duration', 'format_cost', 'parse_seconds']
