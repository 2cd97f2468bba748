from html import escape
from typing import List

from models.models import ConservationReport, HamiltonianSummary, InvariantReport, VerificationSummary


def generate_hamiltonian_html(summary: HamiltonianSummary) -> str:
    """
    Generate HTML for the Hamiltonian and its canonical equations.

    Args:
        summary: Printable Hamiltonian of the system.

    Returns:
        HTML string with H and one row per canonical equation.
    """
    rows = []
    for name, expr in zip(summary.space_vars, summary.rdot):
        rows.append(f"<tr><td>d{escape(name)}/dt</td><td><code>{escape(expr)}</code></td></tr>")
    for name, expr in zip(summary.momentum_names, summary.pdot):
        rows.append(f"<tr><td>d{escape(name)}/dt</td><td><code>{escape(expr)}</code></td></tr>")
    return f'''
    <div class="metric-box"><strong>H</strong> = <code>{escape(summary.H)}</code></div>
    <table class="equations">
        {"".join(rows)}
    </table>
    '''


def _verdict_badge(verdict: str) -> str:
    color = "#2e7d32" if verdict == "pass" else "#c62828"
    return f'<span style="color: {color}; font-weight: 600;">{verdict.upper()}</span>'


def _residual_text(report: InvariantReport) -> str:
    if report.residual is None:
        return "-"
    if isinstance(report.residual, float):
        return f"{report.residual:.3e}"
    return escape(str(report.residual))


def generate_reports_html(reports: List[InvariantReport]) -> str:
    """
    Generate an HTML table of invariant reports.
    """
    if not reports:
        return '<div class="no-metrics"><p>No candidate invariants in this spec.</p></div>'
    rows = "".join(
        f"<tr><td>{escape(r.label)}</td><td>{r.mode}</td><td>{_verdict_badge(r.verdict)}</td>"
        f"<td><code>{_residual_text(r)}</code></td></tr>"
        for r in reports
    )
    return f'''
    <table class="reports">
        <tr><th>Candidate</th><th>Mode</th><th>Verdict</th><th>Residual</th></tr>
        {rows}
    </table>
    '''


def generate_verification_html(summary: VerificationSummary) -> str:
    html = generate_reports_html(summary.reports)
    if summary.functional is not None:
        html += f"<p>Bracket check: {_verdict_badge(summary.functional.verdict)}</p>"
    rec = summary.reconstruction
    if rec is not None:
        if rec.success:
            html += f"<p>Nambu form recovered with h = <code>{escape(rec.h)}</code>, g = <code>{escape(rec.g)}</code></p>"
        else:
            residual = ", ".join(rec.residual)
            html += f"<p>No unit-bracket Nambu form; residual <code>({escape(residual)})</code></p>"
    for warning in summary.warnings:
        html += f'<p class="warning">{escape(warning)}</p>'
    return html


def generate_basis_html(report: InvariantReport) -> str:
    items = "".join(f"<li><code>{escape(p)}</code></li>" for p in report.basis)
    return f"<p>{escape(report.label)}</p><ul>{items}</ul>"


def generate_conservation_html(report: ConservationReport) -> str:
    """
    Generate an HTML table of drifts along the simulated trajectory.
    """
    rows = "".join(
        f"<tr><td>{escape(q.name)}</td><td>{q.initial:.17g}</td><td>{q.max_drift:.3e}</td>"
        f"<td>{q.time_of_max_drift:.6g}</td></tr>"
        for q in report.quantities
    )
    kind = "canonical" if report.canonical else "configuration"
    return f'''
    <p>{report.method}, dt = {report.dt}, t_end = {report.t_end}, {kind} run, {report.stored_states} stored states</p>
    <table class="reports">
        <tr><th>Quantity</th><th>Initial</th><th>Max drift</th><th>At time</th></tr>
        {rows}
    </table>
    '''
