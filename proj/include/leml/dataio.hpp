/*
 * Copyright 2026 LEML Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LEML_DATAIO_HPP
#define LEML_DATAIO_HPP

#include <cstdint>
#include <string>

#include "leml/trainer.hpp"

namespace leml {

// On-disk dataset format (plain text, newline-delimited):
//
//   n d L
//   <labels> <fid>:<val> <fid>:<val> ...
//   ...                                     (n data lines)
//
// The label field is the first whitespace-delimited token of a line (empty
// when the line starts with whitespace). It is either a comma-separated
// list of positive label indices — full-label style: listed = 1, unlisted
// = 0 — or a comma-separated list of j:v pairs with v in {0,1} —
// missing-label style: listed = observed, unlisted = missing. The two
// styles may not be mixed within one file. Indices are 0-based by default;
// index_base shifts them at parse time.

struct Dataset {
    SparseRowMatrix X; // n x d
    Labels labels;

    std::size_t instances() const { return X.rows; }
    std::size_t features() const { return X.cols; }
    std::size_t label_count() const { return labels.label_count(); }
};

// Throws ParseError with a line number on any malformed input: mixed label
// styles, duplicate indices, non-numeric tokens, indices outside the
// declared dimensions, truncated files.
Dataset read_multilabel(const std::string& path, int index_base = 0);

void write_multilabel(const Dataset& data, const std::string& path);

// Samples round(ratio * n * L) distinct cells of the full grid uniformly
// without replacement (seeded, reproducible); observed values come from Y
// (absent = 0).
ObservationSet make_mask(const SparseRowMatrix& Y, double observed_ratio, std::uint64_t seed);

// Model file: header `LEML 1 <d> <L> <k> <loss-tag> <lambda>`, optional
// comment lines starting with '#', then d rows of W and L rows of H, k
// floats each, printed with 17 significant digits so read(write(m)) is
// value-identical.
void write_model(const FactorModel& model, const std::string& path, const std::string& comment = "");
FactorModel read_model(const std::string& path);

} // namespace leml

#endif // LEML_DATAIO_HPP
