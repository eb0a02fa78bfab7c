"""
Table Controller - reads and writes the plain-text artifacts.

    table file     header `src,dst,wavelength,timeslot`, one grant per row,
                   rows sorted by (src, dst, wavelength), then `; fingerprint=<hex>`
                   when the table carries one
    metrics file   header `scope,name,value`, ratios with 6 significant digits
    traffic spec   `uniform:<k>`, `bernoulli:<p>` or `hotspot:<entity>:<mult>`
"""
import csv
import io
from pathlib import Path
from typing import Iterable, List, Union

from pydantic import ValidationError

from ponfabric.models.assignment import AssignmentTable
from ponfabric.models.simulation import Metrics, SummaryRow, TrafficModel
from ponfabric.tdm_simulator import tdm_simulator
from ponfabric.utils.errors import ConfigError, TableFormatError
from ponfabric.utils.logger import logger


TABLE_HEADER = ["src", "dst", "wavelength", "timeslot"]
METRICS_HEADER = ["scope", "name", "value"]
FINGERPRINT_PREFIX = "; fingerprint="


def format_value(value: Union[int, float]) -> str:
    if isinstance(value, int):
        return str(value)
    return f"{value:.6g}"


class TableController:
    """
    Controller for table, metrics and traffic-spec text formats.
    Output is deterministic: identical inputs give byte-identical text.
    """

    def emit_table(self, table: AssignmentTable) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(TABLE_HEADER)
        for record in table.sorted().assignments:
            writer.writerow([record.src, record.dst, record.wavelength, record.timeslot])
        if table.fingerprint:
            buffer.write(f"{FINGERPRINT_PREFIX}{table.fingerprint}\n")
        return buffer.getvalue()

    def parse_table(self, text: str) -> AssignmentTable:
        """
        Parses table-file text. Lines starting with `;` are comments; a
        trailing `; fingerprint=<hex>` line restores the table's provenance.

        Raises:
            TableFormatError: with the offending line number
        """
        rows = []
        fingerprint = None
        for number, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if stripped.startswith(FINGERPRINT_PREFIX):
                fingerprint = stripped[len(FINGERPRINT_PREFIX):].strip() or None
            elif stripped and not stripped.startswith(";"):
                rows.append((number, next(csv.reader([line]))))

        if not rows:
            raise TableFormatError("empty table file, expected header " + ",".join(TABLE_HEADER), line=1)

        number, header = rows[0]
        if [cell.strip() for cell in header] != TABLE_HEADER:
            raise TableFormatError(f"expected header {','.join(TABLE_HEADER)}", line=number)

        records = []
        for number, row in rows[1:]:
            if len(row) != len(TABLE_HEADER):
                raise TableFormatError(f"expected 4 fields, got {len(row)}", line=number)
            src, dst, wavelength, timeslot = (cell.strip() for cell in row)
            try:
                records.append((src, dst, int(wavelength), int(timeslot)))
            except ValueError:
                raise TableFormatError(
                    f"wavelength and timeslot must be integers (got: {wavelength}, {timeslot})", line=number
                ) from None

        return AssignmentTable.from_records(records, fingerprint=fingerprint)

    def read_table(self, path: Union[str, Path]) -> AssignmentTable:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise TableFormatError(f"cannot read table file {path}: {e.strerror}") from e
        table = self.parse_table(text)
        logger.info(f"Read {len(table)} grants from {path}")
        return table

    def write_table(self, path: Union[str, Path], table: AssignmentTable) -> None:
        Path(path).write_text(self.emit_table(table), encoding="utf-8")
        logger.info(f"Wrote {len(table)} grants to {path}")

    def parse_traffic(self, spec: str, seed: int = 0) -> TrafficModel:
        """
        Parses a traffic spec string.

        Raises:
            ConfigError: on an unknown kind, a malformed number, or an out-of-range value
        """
        kind, _, rest = spec.strip().partition(":")
        try:
            if kind == "uniform":
                return TrafficModel(kind="uniform", packets=int(rest), seed=seed)
            if kind == "bernoulli":
                return TrafficModel(kind="bernoulli", probability=float(rest), seed=seed)
            if kind == "hotspot":
                target, sep, multiplier = rest.rpartition(":")
                if not sep:
                    raise ConfigError(f"hotspot spec needs hotspot:<entity>:<mult> (got: {spec})")
                return TrafficModel(kind="hotspot", target=target, multiplier=float(multiplier), seed=seed)
        except ValidationError as e:
            detail = e.errors()[0]
            field = detail["loc"][0] if detail["loc"] else kind
            raise ConfigError(f"traffic spec {spec}: {field} {detail['msg'].lower()}") from None
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"traffic spec {spec}: malformed number") from None
        raise ConfigError(f"unknown traffic kind '{kind}' (expected uniform, bernoulli or hotspot)")

    def metrics_rows(self, metrics: Metrics) -> List[SummaryRow]:
        rows = [
            SummaryRow("global", "frames", metrics.frames),
            SummaryRow("global", "time_slots", metrics.time_slots),
            SummaryRow("global", "offered", metrics.offered),
            SummaryRow("global", "delivered", metrics.delivered),
            SummaryRow("global", "queued", metrics.queued),
        ]
        for pair in sorted(metrics.pairs, key=lambda p: (p.src, p.dst)):
            name = f"{pair.src}->{pair.dst}"
            rows.extend([
                SummaryRow("pair", f"{name}.grants", pair.grants),
                SummaryRow("pair", f"{name}.offered", pair.offered),
                SummaryRow("pair", f"{name}.delivered", pair.delivered),
                SummaryRow("pair", f"{name}.queued", pair.queued),
                SummaryRow("pair", f"{name}.mean_delay", pair.mean_delay),
                SummaryRow("pair", f"{name}.max_delay", pair.max_delay),
            ])
        rows.extend(tdm_simulator.utilization_summary(metrics))
        return rows

    def emit_metrics(self, rows: Iterable[SummaryRow]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(METRICS_HEADER)
        for row in rows:
            writer.writerow([row.scope, row.name, format_value(row.value)])
        return buffer.getvalue()

    def write_metrics(self, path: Union[str, Path], metrics: Metrics) -> None:
        Path(path).write_text(self.emit_metrics(self.metrics_rows(metrics)), encoding="utf-8")
        logger.info(f"Wrote metrics to {path}")


# Create singleton instance
table_controller = TableController()
