# utils/log.py
# 로깅 설정 ("[Component] message" 형식)

import logging
import sys


ROOT_LOGGER = 'irpflow'
LOG_FORMAT = '[%(component)s] %(message)s'


class _ComponentAdapter(logging.LoggerAdapter):
    """로그 레코드에 component 필드 추가"""

    def process(self, msg, kwargs):
        extra = kwargs.setdefault('extra', {})
        extra.setdefault('component', self.extra['component'])
        return msg, kwargs


class _DefaultComponent(logging.Filter):
    """어댑터를 거치지 않은 레코드용 기본 component"""

    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, 'component'):
            record.component = record.name.rsplit('.', 1)[-1].upper()
        return True


def get_logger(component: str) -> logging.LoggerAdapter:
    """컴포넌트 로거 (예: get_logger('hgs') → irpflow.hgs, 접두어 [HGS])"""
    logger = logging.getLogger(f"{ROOT_LOGGER}.{component}")
    return _ComponentAdapter(logger, {'component': component.upper()})


def setup_logging(verbose: bool = False, level: str = None, stream=None) -> logging.Logger:
    """패키지 로거 설정 (CLI 에서 한 번 호출)"""
    logger = logging.getLogger(ROOT_LOGGER)
    if level is None:
        level = 'DEBUG' if verbose else 'INFO'
    logger.setLevel(getattr(logging, str(level).upper(), logging.INFO))

    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler.addFilter(_DefaultComponent())
    logger.addHandler(handler)
    logger.propagate = False
    return logger


__all__ = ['get_logger', 'setup_logging', 'ROOT_LOGGER', 'LOG_FORMAT']
