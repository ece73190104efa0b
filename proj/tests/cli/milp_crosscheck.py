"""Re-solve an exported community MILP with HiGHS and compare objectives."""
import argparse
import json
import pathlib
import subprocess
import sys
import tempfile

try:
    import highspy
except ImportError:
    print("highspy not installed")
    sys.exit(77)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--recdr", required=True)
    ap.add_argument("--scenario", required=True)
    ap.add_argument("--objective", default="entities")
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        lp = pathlib.Path(tmp) / "model.lp"
        out = pathlib.Path(tmp) / "report"
        subprocess.run([args.recdr, "export-milp", "--scenario", args.scenario, "--objective", args.objective,
                        "--out", str(lp)], check=True)
        subprocess.run([args.recdr, "community", "--scenario", args.scenario, "--objective", args.objective,
                        "--out", str(out), "--format", "json"], check=True)
        report = json.loads((out / "report.json").read_text())
        internal = report["days"][0]["objective_value"]

        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        h.setOptionValue("mip_rel_gap", 1e-9)
        if h.readModel(str(lp)) != highspy.HighsStatus.kOk:
            print("HiGHS could not read the model")
            return 1
        h.run()
        if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
            print("HiGHS status", h.modelStatusToString(h.getModelStatus()))
            return 1
        external = h.getInfo().objective_function_value

    rel = abs(external - internal) / max(1.0, abs(internal))
    print(f"{args.objective}: internal {internal:.9g}, HiGHS {external:.9g}, relative difference {rel:.3g}")
    return 0 if rel <= 1e-4 else 1


if __name__ == "__main__":
    sys.exit(main())
