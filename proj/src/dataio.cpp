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

#include "leml/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "leml/error.hpp"
#include "leml/rng.hpp"

namespace leml {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line_no, const std::string& what) {
    throw ParseError(path + ":" + std::to_string(line_no) + ": " + what);
}

// Strict non-negative integer parse: the whole token must be digits.
bool parse_index(const std::string& tok, std::size_t& out) {
    if (tok.empty() || tok.size() > 18) return false;
    std::size_t v = 0;
    for (char c : tok) {
        if (c < '0' || c > '9') return false;
        v = v * 10 + static_cast<std::size_t>(c - '0');
    }
    out = v;
    return true;
}

bool parse_double(const std::string& tok, double& out) {
    if (tok.empty()) return false;
    char* end = nullptr;
    out = std::strtod(tok.c_str(), &end);
    return end == tok.c_str() + tok.size() && std::isfinite(out);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t p = s.find(sep, start);
        if (p == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, p - start));
        start = p + 1;
    }
}

// Applies the index base shift; rejects indices below the base.
std::size_t shift_index(const std::string& path, std::size_t line_no, std::size_t raw, int base,
                        std::size_t dim, const char* what) {
    if (base > 0 && raw < static_cast<std::size_t>(base)) {
        fail(path, line_no, std::string(what) + " index below index base");
    }
    const std::size_t idx = raw - static_cast<std::size_t>(base);
    if (idx >= dim) fail(path, line_no, std::string(what) + " index out of range");
    return idx;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

Dataset read_multilabel(const std::string& path, int index_base) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");

    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) fail(path, line_no, "missing header line");
    std::size_t n = 0, d = 0, L = 0;
    {
        std::istringstream hs(line);
        std::string tn, td, tl, extra;
        if (!(hs >> tn >> td >> tl) || (hs >> extra)) fail(path, line_no, "header must be `n d L`");
        if (!parse_index(tn, n) || !parse_index(td, d) || !parse_index(tl, L)) {
            fail(path, line_no, "non-numeric header field");
        }
        const std::size_t dim_cap = 100000000; // keeps index bookkeeping allocations sane
        if (n > dim_cap || d > dim_cap || L > dim_cap) fail(path, line_no, "implausibly large dimension");
    }

    std::vector<std::tuple<std::size_t, std::size_t, double>> x_entries;
    std::vector<ObservationEntry> omega_entries;
    std::vector<std::tuple<std::size_t, std::size_t, double>> y_entries;
    int style = 0; // 0 = undecided, 1 = full, 2 = missing

    for (std::size_t i = 0; i < n; i++) {
        line_no++;
        if (!std::getline(in, line)) fail(path, line_no, "truncated file: expected " + std::to_string(n) + " data lines");
        if (!line.empty() && line.back() == '\r') line.pop_back();

        const bool empty_label_field = line.empty() || line[0] == ' ' || line[0] == '\t';
        std::istringstream ls(line);
        std::string label_field;
        if (!empty_label_field) ls >> label_field;

        if (!label_field.empty()) {
            const bool missing_style = label_field.find(':') != std::string::npos;
            const int this_style = missing_style ? 2 : 1;
            if (style == 0) style = this_style;
            if (style != this_style) fail(path, line_no, "mixed full/missing label styles in one file");

            std::vector<std::size_t> line_labels;
            for (const std::string& item : split(label_field, ',')) {
                if (missing_style) {
                    const std::size_t colon = item.find(':');
                    if (colon == std::string::npos || item.find(':', colon + 1) != std::string::npos) {
                        fail(path, line_no, "bad observed-label token `" + item + "`");
                    }
                    std::size_t raw;
                    if (!parse_index(item.substr(0, colon), raw)) {
                        fail(path, line_no, "non-numeric label index in `" + item + "`");
                    }
                    const std::string vtok = item.substr(colon + 1);
                    if (vtok != "0" && vtok != "1") {
                        fail(path, line_no, "observed label value must be 0 or 1 in `" + item + "`");
                    }
                    const std::size_t j = shift_index(path, line_no, raw, index_base, L, "label");
                    line_labels.push_back(j);
                    omega_entries.push_back({i, j, vtok == "1" ? 1.0 : 0.0});
                } else {
                    std::size_t raw;
                    if (!parse_index(item, raw)) {
                        fail(path, line_no, "non-numeric label index `" + item + "`");
                    }
                    const std::size_t j = shift_index(path, line_no, raw, index_base, L, "label");
                    line_labels.push_back(j);
                    y_entries.emplace_back(i, j, 1.0);
                }
            }
            std::sort(line_labels.begin(), line_labels.end());
            if (std::adjacent_find(line_labels.begin(), line_labels.end()) != line_labels.end()) {
                fail(path, line_no, "duplicate label index");
            }
        }

        std::string ftok;
        std::vector<std::size_t> line_features;
        while (ls >> ftok) {
            const std::size_t colon = ftok.find(':');
            if (colon == std::string::npos || ftok.find(':', colon + 1) != std::string::npos) {
                fail(path, line_no, "bad feature token `" + ftok + "`");
            }
            std::size_t raw;
            double val;
            if (!parse_index(ftok.substr(0, colon), raw)) {
                fail(path, line_no, "non-numeric feature index in `" + ftok + "`");
            }
            if (!parse_double(ftok.substr(colon + 1), val)) {
                fail(path, line_no, "non-numeric feature value in `" + ftok + "`");
            }
            const std::size_t f = shift_index(path, line_no, raw, index_base, d, "feature");
            line_features.push_back(f);
            x_entries.emplace_back(i, f, val);
        }
        std::sort(line_features.begin(), line_features.end());
        if (std::adjacent_find(line_features.begin(), line_features.end()) != line_features.end()) {
            fail(path, line_no, "duplicate feature index");
        }
    }
    while (std::getline(in, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) fail(path, line_no, "trailing content after " + std::to_string(n) + " data lines");
    }

    Dataset data;
    data.X = SparseRowMatrix::from_triplets(n, d, std::move(x_entries));
    if (style == 2) {
        data.labels = Labels::observed(ObservationSet::from_entries(n, L, std::move(omega_entries)));
    } else {
        data.labels = Labels::full_labels(SparseRowMatrix::from_triplets(n, L, std::move(y_entries)));
    }
    return data;
}

void write_multilabel(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    const std::size_t n = data.instances();
    out << n << ' ' << data.features() << ' ' << data.label_count() << '\n';
    for (std::size_t i = 0; i < n; i++) {
        std::string label_field;
        if (data.labels.full) {
            const SparseRowMatrix& Y = data.labels.Y;
            bool first = true;
            for (std::size_t p = Y.row_ptr[i]; p < Y.row_ptr[i + 1]; p++) {
                if (Y.values[p] == 0.0) continue;
                if (!first) label_field += ',';
                label_field += std::to_string(Y.col_idx[p]);
                first = false;
            }
        } else {
            const ObservationSet& o = data.labels.omega;
            bool first = true;
            for (std::size_t e = o.row_ptr[i]; e < o.row_ptr[i + 1]; e++) {
                if (!first) label_field += ',';
                label_field += std::to_string(o.label[e]);
                label_field += o.value[e] == 1.0 ? ":1" : ":0";
                first = false;
            }
        }
        out << label_field;
        const SparseRowMatrix& X = data.X;
        for (std::size_t p = X.row_ptr[i]; p < X.row_ptr[i + 1]; p++) {
            out << ' ' << X.col_idx[p] << ':' << format_double(X.values[p]);
        }
        out << '\n';
    }
    if (!out) throw ParseError(path + ": write failed");
}

ObservationSet make_mask(const SparseRowMatrix& Y, double observed_ratio, std::uint64_t seed) {
    if (!(observed_ratio > 0.0) || observed_ratio > 1.0) {
        throw std::invalid_argument("make_mask: ratio must be in (0, 1]");
    }
    const std::uint64_t total = static_cast<std::uint64_t>(Y.rows) * Y.cols;
    const std::uint64_t count = static_cast<std::uint64_t>(std::llround(observed_ratio * static_cast<double>(total)));

    // Partial Fisher-Yates over the flattened grid; only touched slots are
    // materialized.
    Rng rng(seed);
    std::unordered_map<std::uint64_t, std::uint64_t> swaps;
    std::vector<std::uint64_t> cells;
    cells.reserve(count);
    for (std::uint64_t t = 0; t < count; t++) {
        const std::uint64_t r = t + rng.below(total - t);
        const auto it_t = swaps.find(t);
        const std::uint64_t vt = it_t == swaps.end() ? t : it_t->second;
        const auto it_r = swaps.find(r);
        const std::uint64_t vr = it_r == swaps.end() ? r : it_r->second;
        cells.push_back(vr);
        swaps[r] = vt;
    }

    std::vector<ObservationEntry> entries;
    entries.reserve(count);
    for (std::uint64_t c : cells) {
        const std::size_t i = static_cast<std::size_t>(c / Y.cols);
        const std::size_t j = static_cast<std::size_t>(c % Y.cols);
        double y = 0.0;
        const std::size_t lo = Y.row_ptr[i], hi = Y.row_ptr[i + 1];
        const auto* first = Y.col_idx.data() + lo;
        const auto* last = Y.col_idx.data() + hi;
        const auto* found = std::lower_bound(first, last, j);
        if (found != last && *found == j) y = Y.values[lo + static_cast<std::size_t>(found - first)];
        entries.push_back({i, j, y != 0.0 ? 1.0 : 0.0});
    }
    return ObservationSet::from_entries(Y.rows, Y.cols, std::move(entries));
}

void write_model(const FactorModel& model, const std::string& path, const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    out << "LEML 1 " << model.W.rows << ' ' << model.H.rows << ' ' << model.rank() << ' '
        << loss_name(model.kind) << ' ' << format_double(model.lambda) << '\n';
    if (!comment.empty()) out << "# " << comment << '\n';
    for (const DenseMatrix* m : {&model.W, &model.H}) {
        for (std::size_t i = 0; i < m->rows; i++) {
            for (std::size_t r = 0; r < m->cols; r++) {
                if (r > 0) out << ' ';
                out << format_double(m->at(i, r));
            }
            out << '\n';
        }
    }
    if (!out) throw ParseError(path + ": write failed");
}

FactorModel read_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) fail(path, line_no, "missing model header");

    std::istringstream hs(line);
    std::string magic, version, loss_tag, lambda_tok;
    std::size_t d = 0, L = 0, k = 0;
    std::string td, tl, tk;
    if (!(hs >> magic >> version >> td >> tl >> tk >> loss_tag >> lambda_tok)) {
        fail(path, line_no, "bad model header");
    }
    if (magic != "LEML") fail(path, line_no, "not a LEML model file");
    if (version != "1") fail(path, line_no, "unsupported model version " + version);
    if (!parse_index(td, d) || !parse_index(tl, L) || !parse_index(tk, k)) {
        fail(path, line_no, "non-numeric model dimensions");
    }
    if (k < 1) fail(path, line_no, "model rank must be >= 1");

    FactorModel model;
    model.kind = loss_from_name(loss_tag);
    if (!parse_double(lambda_tok, model.lambda) || model.lambda < 0) {
        fail(path, line_no, "bad lambda in model header");
    }
    model.W.resize(d, k);
    model.H.resize(L, k);

    for (DenseMatrix* m : {&model.W, &model.H}) {
        for (std::size_t i = 0; i < m->rows; i++) {
            do {
                line_no++;
                if (!std::getline(in, line)) fail(path, line_no, "truncated model file");
                if (!line.empty() && line.back() == '\r') line.pop_back();
            } while (!line.empty() && line[0] == '#');
            std::istringstream ls(line);
            std::string tok;
            for (std::size_t r = 0; r < m->cols; r++) {
                if (!(ls >> tok)) fail(path, line_no, "short factor row");
                double v;
                if (!parse_double(tok, v)) fail(path, line_no, "non-numeric factor value `" + tok + "`");
                m->at(i, r) = v;
            }
            if (ls >> tok) fail(path, line_no, "extra values on factor row");
        }
    }
    while (std::getline(in, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] != '#') fail(path, line_no, "trailing content after the factor rows");
    }
    return model;
}

} // namespace leml
