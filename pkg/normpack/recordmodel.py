# -*- coding: utf-8 -*-

"""
normpack.recordmodel
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module exists to store the results of verifier checks, pipeline runs and
sweeps. Its classes also handle output of those results to JSON lines and CSV.

Records are serialized with sorted keys and no timing information, so the
same inputs and seeds always produce byte-identical files.
"""

import csv
import json
import logging

from dataclasses import asdict, dataclass, field

logger = logging.getLogger(__name__)

VERDICT_PASS = "pass"
VERDICT_FAIL = "fail"
VERDICT_INCONCLUSIVE = "inconclusive"

check_report_fieldnames = [
    'check', 'body', 'd', 'params', 'value', 'std_error', 'bound',
    'violations', 'trials', 'seed', 'verdict', 'notes'
]

sweep_table_fieldnames = [
    'd', 'Delta', 'n_sampled', 'n_retained', 'size', 'density',
    'trivial_bound', 'log_delta_over_delta', 'status', 'error'
]

class RecordModelException(Exception):
    """An exception class to be used by the functions in this file so that the
    source of error can be detected.
    """
    pass

class RecordModelNoSuchCheck(RecordModelException):
    """An exception class to be used when the requested check is not stored
    by an instance of `RecordModel`.
    """
    pass


@dataclass
class CheckReport:
    """The outcome of one verifier. Violations are report content: a
    verifier never raises because an inequality failed.
    """

    check: str
    body: str
    d: int
    params: dict = field(default_factory=dict)
    value: float = None
    std_error: float = None
    bound: float = None
    violations: int = 0
    trials: int = 0
    seed: int = None
    verdict: str = VERDICT_PASS
    notes: str = ""

    @property
    def passed(self):
        return self.verdict == VERDICT_PASS

    def to_dict(self):
        return asdict(self)


@dataclass
class RunRecord:
    """The persistent outcome of one pipeline run."""

    config_hash: str
    config: dict
    ik: dict = None
    prune_report: dict = None
    packing: dict = None
    checks: list = field(default_factory=list)
    status: str = "ok"
    error: str = None

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _flatten_for_csv(row):

    flattened = {}

    for key, value in row.items():

        if isinstance(value, (dict, list)):
            flattened[key] = json.dumps(value, sort_keys=True)
        else:
            flattened[key] = value

    return flattened

class RecordModel:
    """
        Keeps check reports, run records and sweep table rows together so
        that one output writer can persist whatever a command produced.
    """

    def __init__(self):
        self.check_reports = []
        self.run_records = []
        self.table_rows = []

    def add_check_report(self, report):
        self.check_reports.append(report)

    def add_run_record(self, record):
        self.run_records.append(record)

    def add_table_row(self, row):
        self.table_rows.append(row)

    def get_check_reports(self):
        return list(self.check_reports)

    def get_check_report(self, checkname):
        """Returns the first report of the check named `checkname`."""

        for report in self.check_reports:
            if report.check == checkname:
                return report

        raise RecordModelNoSuchCheck(
            "no report for check {} is stored".format(checkname))

    def get_run_records(self):
        return list(self.run_records)

    def get_table_rows(self):
        return list(self.table_rows)

    def get_verdict_counts(self):

        counts = {VERDICT_PASS: 0, VERDICT_FAIL: 0, VERDICT_INCONCLUSIVE: 0}

        for report in self.check_reports:
            counts[report.verdict] = counts.get(report.verdict, 0) + 1

        return counts

    def get_total_violations(self):
        return sum(report.violations for report in self.check_reports)

    def all_passed(self):
        return all(report.passed for report in self.check_reports)

    def generate_dict(self):

        return {
            "checks": [ report.to_dict() for report in self.check_reports ],
            "runs": [ record.to_dict() for record in self.run_records ],
            "table": list(self.table_rows),
            "summary": {
                "verdicts": self.get_verdict_counts(),
                "violations": self.get_total_violations()
            }
        }

    def generate_lines(self):
        """JSON lines: run records first, then check reports, then table
        rows, each with sorted keys.
        """

        lines = [ record.to_json() for record in self.run_records ]

        lines.extend( json.dumps(report.to_dict(), sort_keys=True)
            for report in self.check_reports )

        lines.extend( json.dumps(row, sort_keys=True)
            for row in self.table_rows )

        return lines

    def save_as_JSON(self, filename):
        """Saves the content of this object as JSON."""

        with open(filename, 'w') as outputjson:
            json.dump(self.generate_dict(), outputjson, indent=4, sort_keys=True)

    def save_as_JSONL(self, filename, append=False):
        """Saves the content of this object as JSON lines."""

        logger.debug("writing {} lines to {}".format(
            len(self.run_records) + len(self.check_reports) + len(self.table_rows),
            filename))

        with open(filename, 'a' if append else 'w') as outputfile:
            for line in self.generate_lines():
                outputfile.write(line + "\n")

    def save_as_CSV(self, filename):
        """Saves the sweep table if there is one, else the check reports,
        as a CSV.
        """

        if self.table_rows:
            fieldnames = sweep_table_fieldnames
            rows = self.table_rows
        else:
            fieldnames = check_report_fieldnames
            rows = [ report.to_dict() for report in self.check_reports ]

        logger.debug("writing {} CSV rows to {}".format(len(rows), filename))

        with open(filename, 'w', newline='') as csvfile:

            writer = csv.DictWriter(csvfile, fieldnames=fieldnames,
                extrasaction='ignore')
            writer.writeheader()

            for row in rows:
                writer.writerow(_flatten_for_csv(row))
