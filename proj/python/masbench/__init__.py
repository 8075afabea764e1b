# Copyright 2026 The masbench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python surface over the native benchmarking core.

The native module speaks JSON text; this wrapper converts to and from
plain dicts so callers never touch serialized strings.
"""

import json

from ._masbench import (  # noqa: F401
    ParseError,
    ValidationError,
    estimate_tokens,
    list_methods,
    stable_digest,
)
from . import _masbench as _native

__all__ = [
    "ParseError",
    "ValidationError",
    "estimate_tokens",
    "evaluate",
    "list_methods",
    "load_dataset",
    "protocol_agreement",
    "report_table",
    "run_grid",
    "run_method",
    "stable_digest",
]


def run_method(method, sample, params=None, script=None):
    """Runs one method on one sample against the scripted mock backend.

    `script` may hold `default_response` and an `entries` list of
    `{"response": ...}` (consumed in order) or
    `{"contains": pattern, "response": ...}` (matched against the prompt).
    Returns the output dict: response, trace, usage, termination.
    """
    out = _native.run_method(
        method,
        json.dumps(sample),
        json.dumps(params) if params else "",
        json.dumps(script) if script else "",
    )
    return json.loads(out)


def evaluate(protocol, sample, response, timeout_ms=10000):
    """Applies a rule or coding protocol; returns the verdict dict."""
    return json.loads(
        _native.evaluate(protocol, json.dumps(sample), response, timeout_ms)
    )


def load_dataset(path, format="unified_jsonl", limit=0, seed=None):
    return json.loads(_native.load_dataset(path, format, limit, seed))


def run_grid(methods, dataset_path, out_path, format="unified_jsonl",
             concurrency=4, limit=0):
    """Runs a method x sample grid on the mock backend; returns the summary."""
    return json.loads(
        _native.run_grid(list(methods), dataset_path, out_path, format,
                         concurrency, limit)
    )


def report_table(run_path, format="csv"):
    return _native.report_table(run_path, format)


def protocol_agreement(run_path):
    return json.loads(_native.protocol_agreement(run_path))
