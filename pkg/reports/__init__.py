"""Report envelopes and JSON/CSV writers."""
from reports.writer import REPORT_FORMATS, envelope, jsonable, render_csv, render_json, write_report
