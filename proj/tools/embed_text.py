#!/usr/bin/env python3
"""Generates a C++ source embedding every .txt file of a directory."""
import pathlib
import sys

HEADER = """\
// Generated by tools/embed_text.py; do not edit. Source of truth: prompts/*.txt
#include <map>
#include <string>

namespace masbench::detail {

const std::map<std::string, std::string>& embedded_prompts() {
  static const std::map<std::string, std::string> prompts = {
"""

FOOTER = """\
  };
  return prompts;
}

}  // namespace masbench::detail
"""


def main() -> int:
    src_dir, out_path = pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])
    parts = [HEADER]
    for path in sorted(src_dir.glob("*.txt")):
        text = path.read_text(encoding="utf-8")
        delim = "MBTXT"
        while f"){delim}\"" in text:
            delim += "_"
        parts.append(f'      {{"{path.stem}", R"{delim}({text}){delim}"}},\n')
    parts.append(FOOTER)
    out_path.write_text("".join(parts), encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
