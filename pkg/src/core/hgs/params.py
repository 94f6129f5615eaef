# core/hgs/params.py
# 탐색 파라미터와 결과

from dataclasses import dataclass, field, fields, replace
from typing import List, Optional, Tuple

from ..instance import Instance
from ..solution import CostBreakdown, Solution


STOP_ITERATIONS = 'iterations'
STOP_STAGNATION = 'stagnation'
STOP_TIME = 'time'


@dataclass
class SearchParams:
    """HGS 파라미터 (값 검사는 __post_init__)"""
    max_iterations: int = 100000
    max_stagnation: int = 10000
    time_limit: Optional[float] = None          # None 이면 인스턴스 규모로 결정
    time_limit_small: float = 2400.0
    time_limit_large: float = 7200.0
    omega_initial: Optional[float] = None       # None 이면 비용/용량 비율로 결정
    omega_min: float = 0.01
    omega_max: float = 100000.0
    penalty_increase: float = 1.2
    penalty_decrease: float = 0.85
    target_feasible_low: float = 0.2
    target_feasible_high: float = 0.25
    adapt_interval: int = 100
    mu: int = 25
    lambda_: int = 40
    elite_fraction: float = 0.4
    n_closest: int = 3
    granularity: int = 20
    repair_probability: float = 0.5
    repair_multipliers: Tuple[float, ...] = (10.0, 100.0)
    diversify_after: Optional[int] = None       # None 이면 max_stagnation // 3
    diversify_fraction: float = 2.0 / 3.0
    initial_population_factor: int = 4
    extra_visit_probability: float = 0.3
    seed: int = 0
    debug: bool = False
    log_interval: int = 500

    def __post_init__(self):
        for name in ('max_iterations', 'max_stagnation', 'mu', 'lambda_', 'n_closest',
                     'granularity', 'adapt_interval', 'initial_population_factor', 'log_interval'):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name}: 양수여야 합니다 ({getattr(self, name)})")
        if self.max_stagnation > self.max_iterations:
            raise ValueError(
                f"max_stagnation({self.max_stagnation}) > max_iterations({self.max_iterations})")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError(f"time_limit: 양수여야 합니다 ({self.time_limit})")
        if not 0 < self.omega_min <= self.omega_max:
            raise ValueError("omega 범위가 잘못되었습니다")
        if not 0.0 <= self.elite_fraction <= 1.0:
            raise ValueError("elite_fraction 은 0..1 범위여야 합니다")
        for name in ('repair_probability', 'extra_visit_probability', 'diversify_fraction'):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} 은 0..1 범위여야 합니다")
        if self.seed < 0:
            raise ValueError("seed 는 0 이상이어야 합니다")

    @classmethod
    def from_config(cls, section: dict, **overrides) -> 'SearchParams':
        """설정 파일 search 섹션 + 명령행 값 (None 은 무시)"""
        names = {f.name for f in fields(cls)}
        values = {}
        for key, value in (section or {}).items():
            key = 'lambda_' if key == 'lambda' else key
            if key in names:
                values[key] = value
        for key, value in overrides.items():
            if value is not None:
                values[key] = value
        return cls(**values)

    def with_seed(self, seed: int) -> 'SearchParams':
        return replace(self, seed=seed)

    @property
    def nb_elite(self) -> int:
        return int(round(self.elite_fraction * self.mu))

    @property
    def diversify_interval(self) -> int:
        return self.diversify_after or max(1, self.max_stagnation // 3)

    def resolve_time_limit(self, instance: Instance) -> float:
        if self.time_limit is not None:
            return self.time_limit
        return self.time_limit_large if instance.is_large else self.time_limit_small

    def resolve_omega(self, instance: Instance) -> float:
        """초기 ω = 최대 간선 비용 / 평균 최대 재고 (범위 내로)"""
        if self.omega_initial is not None:
            return min(self.omega_max, max(self.omega_min, self.omega_initial))
        max_cost = max((max(row) for row in instance.cost), default=1.0)
        mean_level = sum(r.max_level for r in instance.retailers) / max(1, instance.n)
        return min(self.omega_max, max(self.omega_min, max_cost / max(1.0, mean_level)))


@dataclass
class SearchResult:
    """탐색 결과와 통계"""
    best: Optional[Solution]                 # 최선 가능해 (없으면 None)
    best_cost: Optional[CostBreakdown]
    best_infeasible: Optional[Solution]
    iterations: int
    elapsed: float
    stop_reason: str
    omega: float
    feasible_fraction: float
    seed: int
    history: List[Tuple[int, float, float]] = field(default_factory=list)   # (반복, 경과 초, 비용)

    @property
    def feasible_found(self) -> bool:
        return self.best is not None

    def summary(self) -> str:
        if self.best_cost is None:
            head = "가능해 없음"
        else:
            c = self.best_cost
            head = (f"비용 {c.total:.2f} (경로 {c.routing:.2f}, 보관 {c.inventory:.2f}, "
                    f"품절 {c.stockout_penalty:.2f})")
        return (f"{head} | 반복 {self.iterations}, {self.elapsed:.1f}초, 종료 사유 {self.stop_reason}, "
                f"ω={self.omega:.3f}, 가능해 비율 {self.feasible_fraction:.2f}")


__all__ = [
    'SearchParams', 'SearchResult', 'STOP_ITERATIONS', 'STOP_STAGNATION', 'STOP_TIME',
]
