import json

from hapqkd.cli import main


def test_budget_text(capsys):
    assert main(["budget"]) == 0
    out = capsys.readouterr().out
    assert "channel total" in out and "4.1800125" in out


def test_budget_json_to_file(tmp_path):
    out = tmp_path / "b.json"
    assert main(["budget", "--json", "--method", "nanobob", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["nanobob"]["channel_total_db"] > doc["method1"]["channel_total_db"]


def test_budget_with_scenario_file(tmp_path):
    path = tmp_path / "s.json"
    path.write_text('{"geometry": {"elevation_deg": 20}}')
    out = tmp_path / "b.txt"
    assert main(["budget", "--scenario", str(path), "--out", str(out)]) == 0
    assert "12.5979638" in out.read_text()


def test_bad_inputs_exit_2(tmp_path, capsys):
    assert main(["budget", "--scenario", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"geometry": {"elevation": 20}}')
    assert main(["budget", "--scenario", str(bad)]) == 2
    assert "unknown key" in capsys.readouterr().err


def test_sweep_figure_csv(tmp_path):
    out = tmp_path / "fig11.csv"
    assert main(["sweep", "--figure", "fig11", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "divergence_mrad,footprint_diameter_m,footprint_radius_m"
    assert len(lines) == 102


def test_sweep_custom(capsys):
    assert main(["sweep", "--var", "geometry.elevation_deg", "--min", "10", "--max", "90",
                 "--points", "3", "--methods", "method1", "--workers", "2"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 4


def test_feasibility_max_loss(capsys):
    assert main(["feasibility", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert abs(doc["max_loss_db"] - 52.28) < 0.01


def test_feasibility_max_divergence(tmp_path):
    s = tmp_path / "s.json"
    s.write_text('{"geometry": {"elevation_deg": 19.47122063449069}}')
    assert main(["feasibility", "--solve", "max-divergence", "--scenario", str(s), "--json",
                 "--out", str(tmp_path / "o.json")]) == 0
    theta = json.loads((tmp_path / "o.json").read_text())["max_divergence_rad"]
    assert 2.4e-3 <= theta <= 3.0e-3


def test_feasibility_no_solution(tmp_path):
    s = tmp_path / "s.json"
    s.write_text('{"geometry": {"elevation_deg": 5}, "sky": {"preset": "day_cloud"}}')
    assert main(["feasibility", "--solve", "max-divergence", "--scenario", str(s)]) == 1


def test_catalog(capsys):
    assert main(["catalog", "--min-payload", "250", "--json"]) == 0
    names = {r["name"] for r in json.loads(capsys.readouterr().out)}
    assert "Stratobus" in names
