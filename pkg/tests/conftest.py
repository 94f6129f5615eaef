# tests/conftest.py
# 저장소 루트를 sys.path 에 추가하고, 설정 폴더를 임시 폴더로 돌린다

import os
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

# src.utils.config 를 처음 import 하기 전에 설정해야 한다
os.environ.setdefault('IRPFLOW_CONFIG_DIR', tempfile.mkdtemp(prefix='irpflow-test-'))

import pytest

from src.core.instance import load_instance

RESOURCES = os.path.join(ROOT, 'src', 'resources', 'instances')


@pytest.fixture
def resource_path():
    def _path(name: str) -> str:
        return os.path.join(RESOURCES, name)
    return _path


@pytest.fixture
def tiny_instance():
    """n=3, H=3, K=1, Q=30 classic 인스턴스"""
    return load_instance(os.path.join(RESOURCES, 'tiny_n3_h3.dat'))


@pytest.fixture
def small_instance():
    """n=5, H=3 classic 인스턴스 (높은 보관비)"""
    return load_instance(os.path.join(RESOURCES, 'small_n5_h3_hc.dat'))


@pytest.fixture
def native_instance():
    return load_instance(os.path.join(RESOURCES, 'tiny_native.json'), fmt='native')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: 시간 측정 테스트 (IRPFLOW_SLOW=1 일 때만 실행)')


def pytest_collection_modifyitems(config, items):
    if os.environ.get('IRPFLOW_SLOW') == '1':
        return
    skip = pytest.mark.skip(reason='IRPFLOW_SLOW=1 로 실행')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip)


@pytest.fixture(params=['large_n50_h6_lc.dat', 'large_n50_h10_lc.dat'])
def large_instance(request):
    """n=50 classic 인스턴스, K=5"""
    return load_instance(os.path.join(RESOURCES, request.param), vehicles=5)
