"""
Analysis Module: Orchestration and Reporting
Runs configured experiments, runs the property suites and writes records,
curves and manifests.
"""

from .records import RecordWriter, read_records, write_csv, write_manifest
from .runner import ExperimentRunner, RunOutcome, run
from .selftest import SuiteResult, run_selftest

__all__ = [
    'RecordWriter', 'read_records', 'write_csv', 'write_manifest',
    'ExperimentRunner', 'RunOutcome', 'run',
    'SuiteResult', 'run_selftest',
]
