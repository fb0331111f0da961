#!/usr/bin/env python3
# Copyright 2026 The QMS Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Prepends the Apache-2.0 header to project sources. Idempotent."""

import pathlib
import sys

LINES = [
    "Copyright 2026 The QMS Authors.",
    "",
    'Licensed under the Apache License, Version 2.0 (the "License");',
    "you may not use this file except in compliance with the License.",
    "You may obtain a copy of the License at",
    "",
    "    http://www.apache.org/licenses/LICENSE-2.0",
    "",
    "Unless required by applicable law or agreed to in writing, software",
    'distributed under the License is distributed on an "AS IS" BASIS,',
    "WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.",
    "See the License for the specific language governing permissions and",
    "limitations under the License.",
]

STYLES = {".cpp": "//", ".hpp": "//", ".py": "#", ".txt": "#", ".env": "#"}
DIRS = ["src", "include", "tests", "tools", "config"]


def header(prefix):
    return "".join((prefix + " " + line).rstrip() + "\n" for line in LINES) + "\n"


def apply(path):
    prefix = STYLES.get(path.suffix)
    if prefix is None:
        return False
    text = path.read_text()
    if LINES[0] in text.split("\n\n", 1)[0] or LINES[0] in "\n".join(text.splitlines()[:3]):
        return False
    shebang = ""
    if text.startswith("#!"):
        shebang, text = text.split("\n", 1)
        shebang += "\n"
    path.write_text(shebang + header(prefix) + text)
    return True


def main(root):
    root = pathlib.Path(root)
    files = [root / "CMakeLists.txt"]
    for d in DIRS:
        files += sorted(p for p in (root / d).rglob("*") if p.is_file())
    changed = [p for p in files if apply(p)]
    for p in changed:
        print(p.relative_to(root))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent)
