"""
Experiment Orchestration
Runs the experiment named by a RunConfig and writes its artifacts.

Records go through a single RecordWriter in deterministic order; curves are
written as CSV at the end and a manifest echoes the configuration, the build
and the instruction-table ordering.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from src.config import RunConfig
from src.module_b.instruction_field import InstructionField
from src.module_d.generators import generate
from src.module_d.schema import InitialFamily, InitialStateSpec
from src.module_c.engine import stabilize
from src.module_e.coupled import coupled_stabilize
from src.module_f.breakpoint import MIN_POINTS, breakpoint_of, estimate_zeta_c
from src.module_f.drive import drive
from src.module_f.gillespie import gillespie_run
from src.module_f.scan import density_scan
from src.module_f.universality import universality_compare
from src.utils.streams import replica_seed

from .records import RecordWriter, read_curve_csv, write_csv, write_manifest
from .selftest import run_selftest

logger = logging.getLogger(__name__)


@dataclass
class RunOutcome:
    """What a run produced, for the terminal summary."""
    experiment: str
    status: int = 0
    title: str = ""
    rows: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    artifacts: Dict[str, str] = field(default_factory=dict)


class ExperimentRunner:
    """
    Execute one configured experiment.
    """

    def __init__(self, config: RunConfig, progress: bool = False):
        """
        Initialize the runner.

        Args:
            config: Validated run configuration
            progress: Show progress bars
        """
        self.config = config
        self.progress = progress
        self.out = config.output.path

    def run(self) -> RunOutcome:
        """
        Run the experiment and write records, curve and manifest.

        Returns:
            RunOutcome; status is non-zero only when a selftest suite failed
        """
        handlers = {
            'drive': self._drive,
            'scan': self._scan,
            'gillespie': self._gillespie,
            'couple': self._couple,
            'selftest': self._selftest,
            'estimate': self._estimate,
            'universality': self._universality,
        }
        kind = self.config.experiment
        if kind not in handlers:
            raise ValueError(f"Unknown experiment '{kind}'")

        logger.info(f"Running {kind} experiment, output in {self.out}")
        self.out.mkdir(parents=True, exist_ok=True)
        records_path = self.out / self.config.output.records
        with RecordWriter(records_path) as writer:
            outcome = handlers[kind](writer)
        outcome.artifacts['records'] = str(records_path)

        if outcome.rows and kind != 'selftest':
            curve_path = self.out / self.config.output.curve
            write_csv(outcome.rows, curve_path)
            outcome.artifacts['curve'] = str(curve_path)

        manifest_path = self.out / self.config.output.manifest
        write_manifest(manifest_path, self.config.to_dict(), self._table(),
                       extra={'files': dict(outcome.artifacts), 'summary': outcome.summary})
        outcome.artifacts['manifest'] = str(manifest_path)
        return outcome

    # --- helpers ----------------------------------------------------------

    def _table(self) -> Optional[Dict[str, Any]]:
        kernel = self.config.make_kernel()
        domain = self.config.make_domain()
        return InstructionField(self.config.engine.seed, self.config.model.lam, kernel,
                                domain).table_description()

    def _common(self) -> Dict[str, Any]:
        return {
            'lambda': self.config.model.lam,
            'kernel': self.config.model.kernel,
            'dimension': self.config.domain.dimension,
            'size': self.config.domain.size,
        }

    # --- experiments ------------------------------------------------------

    def _drive(self, writer: RecordWriter) -> RunOutcome:
        c = self.config
        if c.domain.boundary != 'absorbing':
            logger.info("The drive runs on an absorbing box")
        initial = c.initial.spec()
        curve = drive(c.make_domain('absorbing'), c.model.lam, c.make_kernel(), c.grid.u,
                      c.grid.replicas, c.engine.seed, family=initial.family,
                      params=initial.params, scheduler=c.engine.scheduler, cap=c.engine.cap,
                      workers=c.engine.workers, progress=self.progress)
        for record in curve.records:
            writer.write({**self._common(), **record})

        summary: Dict[str, Any] = {}
        finite = [p for p in curve.points if np.isfinite(p.mean)]
        if len(finite) >= MIN_POINTS:
            estimate = estimate_zeta_c(curve, seed=c.engine.seed)
            summary['breakpoint'] = estimate.to_dict()
        return RunOutcome('drive', title=f"Drive curve ({curve.label})",
                          rows=curve.rows(), summary=summary)

    def _scan(self, writer: RecordWriter) -> RunOutcome:
        c = self.config
        result = density_scan(c.make_domain('torus'), c.model.lam, c.make_kernel(), c.grid.zeta,
                              c.initial.spec(), c.grid.replicas, c.engine.seed,
                              scheduler=c.engine.scheduler, cap=c.engine.cap,
                              compare_double=c.grid.double, workers=c.engine.workers,
                              progress=self.progress)
        for record in result.records:
            writer.write({**self._common(), **record})
        return RunOutcome('scan', title=f"Density scan ({result.label})", rows=result.rows())

    def _gillespie(self, writer: RecordWriter) -> RunOutcome:
        c = self.config
        domain = c.make_domain()
        kernel = c.make_kernel()
        rows = []
        for r in range(c.grid.replicas):
            seed = replica_seed(c.engine.seed, r)
            config = generate(c.initial.spec(seed), domain)
            field_ = InstructionField(seed, c.model.lam, kernel, domain)
            trace = gillespie_run(config, field_, horizon=c.engine.horizon, seed=seed,
                                  record_events=False)
            matches = None
            if not trace.truncated:
                report = stabilize(config, None, field_, scheduler=c.engine.scheduler,
                                   cap=c.engine.cap)
                matches = report.stable and trace.counts == report.increment
            record = trace.to_record(experiment='gillespie', replica=r, seed=seed,
                                     matches_odometer=matches, **self._common())
            writer.write(record)
            rows.append({k: record[k] for k in ('replica', 'events', 'time', 'truncated',
                                                'matches_odometer')})
        return RunOutcome('gillespie', title="Continuous-time runs", rows=rows)

    def _couple(self, writer: RecordWriter) -> RunOutcome:
        c = self.config
        domain = c.make_domain('torus')
        kernel = c.make_kernel()
        family = InitialFamily.parse(c.coupling.family)
        rows = []
        round_cap_exceeded = 0
        for r in range(c.coupling.runs):
            seed = replica_seed(c.engine.seed, r)
            eta0 = generate(InitialStateSpec(family, c.coupling.zeta1, seed=seed), domain)
            xi0 = generate(InitialStateSpec(family, c.coupling.zeta2,
                                            seed=replica_seed(seed, 1)), domain)
            field_ = InstructionField(seed, c.model.lam, kernel, domain)
            report = coupled_stabilize(eta0, xi0, field_, round_cap=c.coupling.round_cap,
                                       cap=c.engine.cap, scheduler=c.engine.scheduler)
            round_cap_exceeded += int(not report.trace.embedded)
            record = report.to_record(experiment='couple', run=r, **self._common())
            writer.write(record)
            rows.append({k: record[k] for k in ('run', 'rounds', 'max_h0', 'max_h1',
                                                'embedding_bound_holds', 'coupling_bound_holds')})
        summary = {'runs': c.coupling.runs, 'round_cap_exceeded': round_cap_exceeded}
        return RunOutcome('couple', title="Coupling runs", rows=rows, summary=summary)

    def _selftest(self, writer: RecordWriter) -> RunOutcome:
        results = run_selftest(self.config.selftest, self.config.engine.seed)
        rows = []
        for result in results:
            writer.write(result.to_record())
            rows.append({
                'suite': result.name,
                'instances': result.instances,
                'passed': result.passed,
                'failed': result.failed,
                'n/a': result.not_applicable,
            })
        failed = sum(not r.ok for r in results)
        return RunOutcome('selftest', status=1 if failed else 0, title="Self-test suites",
                          rows=rows, summary={'failed_suites': failed})

    def _estimate(self, writer: RecordWriter) -> RunOutcome:
        c = self.config
        if not c.estimate.curve:
            raise ValueError("estimate needs estimate.curve (a curve CSV)")
        data = read_curve_csv(Path(c.estimate.curve))
        estimate = breakpoint_of(data['u'], data['zeta'], n_bootstrap=c.estimate.bootstrap,
                                 seed=c.engine.seed, label=Path(c.estimate.curve).stem)
        record = {'experiment': 'estimate', 'curve': c.estimate.curve, **estimate.to_dict()}
        writer.write(record)
        return RunOutcome('estimate', title="Breakpoint estimate", rows=[],
                          summary=estimate.to_dict())

    def _universality(self, writer: RecordWriter) -> RunOutcome:
        c = self.config
        report = universality_compare(c.family_specs(), c.grid.zeta, c.model.lam,
                                      c.make_kernel(), c.domain.dimension, c.domain.size,
                                      c.grid.replicas, c.engine.seed, u_grid=c.grid.u,
                                      scheduler=c.engine.scheduler, cap=c.engine.cap,
                                      workers=c.engine.workers)
        for label, scan in report.scans.items():
            for record in scan.records:
                writer.write({**self._common(), **record})
        rows = [comparison.to_row() for comparison in report.comparisons]
        for row in rows:
            writer.write({'experiment': 'universality', **row})
        summary = {
            'all_agree': report.all_agree,
            'breakpoints': {k: v.to_dict() for k, v in report.breakpoints.items()},
            'breakpoint_differences': {k: v.to_dict()
                                       for k, v in report.breakpoint_differences.items()},
            'breakpoints_agree': report.breakpoints_agree,
        }
        return RunOutcome('universality', title="Family comparison", rows=rows, summary=summary)


def run(config: RunConfig, progress: bool = False) -> RunOutcome:
    """Module-level form of ExperimentRunner.run."""
    return ExperimentRunner(config, progress).run()
