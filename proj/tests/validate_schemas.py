# Copyright 2026 The sfoa Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Runs the sfoa binary and validates every JSON artifact against schemas/."""

import argparse
import json
import math
import pathlib
import random
import struct
import subprocess
import sys
import tempfile

import jsonschema


def write_mono_wav(path, samples, rate=24000):
    data = struct.pack("<%df" % len(samples), *samples)
    header = struct.pack("<4sI4s4sIHHIIHH4sI", b"RIFF", 36 + len(data), b"WAVE", b"fmt ", 16,
                         3, 1, rate, rate * 4, 4, 32, b"data", len(data))
    path.write_bytes(header + data)


def run(cli, *args):
    result = subprocess.run([cli, *map(str, args)], capture_output=True, text=True)
    if result.returncode != 0:
        sys.exit(f"sfoa {' '.join(map(str, args))} exited {result.returncode}:\n{result.stderr}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--cli", required=True)
    parser.add_argument("--schemas", required=True, type=pathlib.Path)
    args = parser.parse_args()

    def validator(name):
        schema = json.loads((args.schemas / f"{name}.schema.json").read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        return jsonschema.Draft202012Validator(schema)

    with tempfile.TemporaryDirectory() as tmp:
        d = pathlib.Path(tmp)
        rng = random.Random(1)
        write_mono_wav(d / "a.wav", [rng.gauss(0.0, 0.1) for _ in range(12000)])
        write_mono_wav(d / "b.wav", [rng.gauss(0.0, 0.1) for _ in range(6000)])
        manifest = {
            "sources": [
                {"azimuth_deg": 30.0, "elevation_deg": 10.0, "gain": 1.0, "file": "a.wav"},
                {"azimuth_deg": -120.0, "elevation_deg": -5.0, "file": "b.wav"},
            ],
            "diffuse_level": 0.01,
            "diffuse_noise": "pink",
            "seed": 3,
        }
        single = {"sources": [{"azimuth_deg": 30.0, "elevation_deg": 10.0, "file": "a.wav"}]}
        (d / "scene.json").write_text(json.dumps(manifest))
        (d / "single.json").write_text(json.dumps(single))
        config = {"seed": 2, "scloss": {"eps": 0}, "vq": {"synth": {"clusters": 3}}}
        (d / "config.json").write_text(json.dumps(config))

        documents = []
        for name in ("scene", "single"):
            validator("scene_manifest").validate(json.loads((d / f"{name}.json").read_text()))
            run(args.cli, "spatialize", "--manifest", d / f"{name}.json", "--out", d / f"{name}.wav")
            documents.append(("truth", d / f"{name}.truth.json"))
        run(args.cli, "analyze", "--in", d / "scene.wav", "--out", d / "frames.csv",
            "--json", d / "analyze.json")
        documents.append(("analyze_summary", d / "analyze.json"))
        run(args.cli, "scloss", "--input", d / "scene.wav", "--recon", d / "single.wav",
            "--json", d / "scloss.json")
        documents.append(("scloss_result", d / "scloss.json"))
        (d / "pairs.txt").write_text("single.wav single.wav\nscene.wav single.wav\n")
        run(args.cli, "evaluate", "--pairs", d / "pairs.txt", "--truth-dir", d,
            "--json", d / "report.json")
        documents.append(("evaluate_report", d / "report.json"))
        run(args.cli, "--config", d / "config.json", "vq", "synth", "--out", d / "x.lat",
            "--centers", d / "centers.json")
        documents.append(("vq_centers", d / "centers.json"))
        documents.append(("cli_config", d / "config.json"))

        failures = 0
        for schema, path in documents:
            doc = json.loads(path.read_text())
            errors = sorted(validator(schema).iter_errors(doc), key=lambda e: list(e.path))
            for e in errors:
                print(f"FAIL {path.name} vs {schema}: {'/'.join(map(str, e.path))}: {e.message}")
            failures += bool(errors)
            if not errors:
                print(f"ok   {path.name} vs {schema}")

        # The schemas must also reject what the CLI rejects.
        bad = dict(manifest, sources=manifest["sources"] * 3)
        if validator("scene_manifest").is_valid(bad):
            print("FAIL scene_manifest accepts six sources")
            failures += 1
        report = json.loads((d / "report.json").read_text())
        if report["files"][0]["compared_to_truth"] is not True:
            print("FAIL single-source truth was not used")
            failures += 1
        if not math.isclose(report["files"][0]["angular_error_deg"], 0.0, abs_tol=0.5):
            print("FAIL single-source scene does not match its truth")
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
