"""Command-line runner, benchmark generators and the enumeration oracle."""

from .bench import BenchmarkError, gen_benchmark
from .main import RunConfig, main, run
from .oracle import OracleError, brute_force_oracle, find_model

__all__ = ["BenchmarkError", "gen_benchmark", "RunConfig", "main", "run",
           "OracleError", "brute_force_oracle", "find_model"]
