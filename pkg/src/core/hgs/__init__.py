# core/hgs/__init__.py
from .params import SearchParams, SearchResult
from .population import Individual, Population, distance
from .genetic import initial_quantities, initialize_individual, crossover
from .engine import HGSEngine, adapt_penalty, run
