# utils/config.py
# 솔버 설정 관리

import copy
import json
import os
from pathlib import Path


CONFIG_DIR_ENV = 'IRPFLOW_CONFIG_DIR'


class Config:
    """솔버 설정을 관리하는 클래스"""

    DEFAULT_CONFIG = {
        'search': {
            'max_iterations': 100000,
            'max_stagnation': 10000,
            'time_limit_small': 2400,
            'time_limit_large': 7200,
            'mu': 25,
            'lambda': 40,
            'elite_fraction': 0.4,
            'n_closest': 3,
            'granularity': 20,
            'omega_min': 0.01,
            'omega_max': 100000.0,
            'repair_probability': 0.5,
            'extra_visit_probability': 0.3,
            'log_interval': 500,
        },
        'instance': {
            'format': 'classic',       # 'classic' or 'native'
            'rounding': 'nearest-integer',
        },
        'output': {
            'solution_dir': 'solutions',
            'csv_delimiter': ',',
        },
        'app': {
            'log_level': 'INFO',
            'debug': False,
            'workers': 1,
        },
    }

    def __init__(self, config_dir: str = None):
        if config_dir is None:
            config_dir = os.environ.get(CONFIG_DIR_ENV) or str(Path.home() / '.irpflow')
        self.config_dir = Path(config_dir)
        self.config_file = self.config_dir / 'config.json'
        self.config = self.load()

    def load(self) -> dict:
        """설정 파일 로드"""
        if self.config_file.exists():
            try:
                with open(self.config_file, 'r', encoding='utf-8') as f:
                    loaded = json.load(f)
                    # 기본값과 병합
                    return self._merge_config(copy.deepcopy(self.DEFAULT_CONFIG), loaded)
            except (OSError, ValueError):
                pass
        return copy.deepcopy(self.DEFAULT_CONFIG)

    def save(self):
        """설정 파일 저장"""
        self.config_dir.mkdir(parents=True, exist_ok=True)
        with open(self.config_file, 'w', encoding='utf-8') as f:
            json.dump(self.config, f, indent=2, ensure_ascii=False)

    def _merge_config(self, default: dict, loaded: dict) -> dict:
        """기본 설정과 로드된 설정 병합 (알 수 없는 키는 무시)"""
        result = default.copy()
        for key, value in loaded.items():
            if key in result:
                if isinstance(result[key], dict) and isinstance(value, dict):
                    result[key] = self._merge_config(result[key], value)
                else:
                    result[key] = value
        return result

    def get(self, *keys):
        """설정값 조회 (예: config.get('search', 'mu'))"""
        value = self.config
        for key in keys:
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return None
        return value

    @property
    def search(self) -> dict:
        return self.get('search') or self.DEFAULT_CONFIG['search']

    @property
    def instance_format(self) -> str:
        return self.get('instance', 'format') or 'classic'

    @property
    def rounding(self) -> str:
        return self.get('instance', 'rounding') or 'nearest-integer'

    @property
    def log_level(self) -> str:
        return self.get('app', 'log_level') or 'INFO'

    @property
    def debug(self) -> bool:
        return bool(self.get('app', 'debug'))


# 전역 설정 인스턴스
config = Config()
