"""Unit tests for result emission."""

import json
import math

import numpy as np
import pytest

from src.analysis.records import (
    BUILD_ID,
    RecordWriter,
    dumps_record,
    read_curve_csv,
    read_records,
    to_jsonable,
    write_csv,
    write_manifest,
)
from src.module_c.schema import VerdictStatus


class TestToJsonable:
    """Test cases for to_jsonable."""

    def test_numpy_values(self):
        """Test that numpy scalars and arrays become plain JSON values."""
        value = to_jsonable({'a': np.int64(3), 'b': np.float32(0.5), 'c': np.bool_(True),
                             'd': np.arange(3)})
        assert value == {'a': 3, 'b': 0.5, 'c': True, 'd': [0, 1, 2]}
        assert type(value['a']) is int

    def test_non_finite_floats_become_null(self):
        """Test that nan and inf are written as null."""
        assert to_jsonable([math.nan, math.inf, 1.5]) == [None, None, 1.5]

    def test_enums_by_value(self):
        """Test that enums are written by value."""
        assert to_jsonable({'status': VerdictStatus.PASS}) == {'status': 'pass'}


class TestRecordWriter:
    """Test cases for the NDJSON writer."""

    def test_sorted_compact_lines(self, temp_dir):
        """Test that records are written as sorted, compact NDJSON lines."""
        path = temp_dir / "records.ndjson"
        with RecordWriter(path) as writer:
            writer.write({'b': 2, 'a': 1})
            writer.write_all([{'z': None}, {'x': [1, 2]}])
        lines = path.read_text().splitlines()
        assert lines == ['{"a":1,"b":2}', '{"z":null}', '{"x":[1,2]}']
        assert writer.count == 3
        assert read_records(path) == [{'a': 1, 'b': 2}, {'z': None}, {'x': [1, 2]}]

    def test_same_records_same_bytes(self, temp_dir):
        """Test that identical records produce identical files."""
        records = [{'seed': 1, 'zeta': 0.25, 'values': np.array([1, 2])}]
        for name in ("one.ndjson", "two.ndjson"):
            with RecordWriter(temp_dir / name) as writer:
                writer.write_all(records)
        assert (temp_dir / "one.ndjson").read_bytes() == (temp_dir / "two.ndjson").read_bytes()

    def test_append(self, temp_dir):
        """Test appending to an existing record file."""
        path = temp_dir / "records.ndjson"
        with RecordWriter(path) as writer:
            writer.write({'n': 1})
        with RecordWriter(path, append=True) as writer:
            writer.write({'n': 2})
        assert [r['n'] for r in read_records(path)] == [1, 2]

    def test_write_outside_context(self, temp_dir):
        """Test that writing outside the context manager raises."""
        with pytest.raises(RuntimeError):
            RecordWriter(temp_dir / "x.ndjson").write({'n': 1})

    def test_dumps_record(self):
        """Test dumps_record on a single record."""
        assert dumps_record({'b': 1.0, 'a': math.nan}) == '{"a":null,"b":1.0}'


class TestCsv:
    """Test cases for curve CSV files."""

    def test_curve_round_trip(self, temp_dir):
        """Test writing a curve CSV and reading it back."""
        path = temp_dir / "curve.csv"
        rows = [{'u': 0.1, 'zeta': 0.1, 'stderr': 0.0},
                {'u': 0.2, 'zeta': math.nan, 'stderr': None},
                {'u': 0.3, 'zeta': 0.25, 'stderr': 0.01}]
        write_csv(rows, path)
        assert path.read_text().splitlines()[0] == "u,zeta,stderr"
        # Rows without a zeta value (capped points) are skipped.
        assert read_curve_csv(path) == {'u': [0.1, 0.3], 'zeta': [0.1, 0.25]}

    def test_empty_rows(self, temp_dir):
        """Test writing a CSV with no rows."""
        path = temp_dir / "empty.csv"
        write_csv([], path)
        assert path.read_text() == ""


class TestManifest:
    """Test cases for the run manifest."""

    def test_manifest_contents(self, temp_dir):
        """Test the fields written to the manifest."""
        path = write_manifest(temp_dir / "sub" / "manifest.json", {'experiment': 'drive'},
                              table={'order': ['sleep']}, extra={'files': {}},
                              timestamp="2024-01-01T00:00:00+00:00")
        manifest = json.loads(path.read_text())
        assert manifest['build'] == BUILD_ID
        assert manifest['config'] == {'experiment': 'drive'}
        assert manifest['instruction_table'] == {'order': ['sleep']}
        assert manifest['artifacts'] == {'files': {}}
        assert manifest['timestamp'] == "2024-01-01T00:00:00+00:00"
