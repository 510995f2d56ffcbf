#include "lcif/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "lcif/errors.hpp"
#include "lcif/hashing.hpp"
#include "lcif/rng.hpp"

namespace lcif::expansion {

namespace {

bool identifier_char(char c, bool first) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return true;
    return !first && c >= '0' && c <= '9';
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::size_t nearest_centroid(const std::vector<double>& p,
                             const std::vector<std::vector<double>>& centroids) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        double d = sq_dist(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

}  // namespace

std::optional<std::set<std::string>> try_placeholders(const std::string& text) {
    std::set<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '}') return std::nullopt;  // close without open
        if (c != '{') {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        std::string name;
        while (j < text.size() && text[j] != '}' && text[j] != '{') {
            if (!identifier_char(text[j], name.empty())) return std::nullopt;
            name += text[j];
            ++j;
        }
        if (j >= text.size() || text[j] != '}' || name.empty()) return std::nullopt;
        out.insert(name);
        i = j + 1;
    }
    return out;
}

std::set<std::string> placeholders(const std::string& text) {
    auto p = try_placeholders(text);
    if (!p) throw ConfigError("malformed placeholder syntax in template: " + text);
    return *p;
}

FixtureRewriteProvider::FixtureRewriteProvider(json table) : table_(std::move(table)) {
    if (!table_.is_object()) throw ConfigError("rewrite fixture must be a JSON object");
}

FixtureRewriteProvider FixtureRewriteProvider::from_file(const std::filesystem::path& path) {
    return FixtureRewriteProvider(read_json_file(path));
}

std::vector<std::string> FixtureRewriteProvider::rewrites(const std::string& seed_text,
                                                          std::size_t n) {
    auto it = table_.find(seed_text);
    if (it == table_.end())
        throw ConfigError("rewrite fixture has no entry for seed: " + seed_text);
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (out.size() >= n) break;
        out.push_back(v.get<std::string>());
    }
    return out;
}

HashEmbedder::HashEmbedder(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) throw ConfigError("embedding dimension must be positive");
}

std::vector<double> HashEmbedder::embed(const std::string& text) const {
    std::vector<double> v(dim_, 0.0);
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start) break;
        std::uint64_t h = fnv1a64(std::string_view(text).substr(start, i - start));
        double sign = (h >> 63) ? 1.0 : -1.0;
        v[h % dim_] += sign;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
    }
    return v;
}

FixtureEmbedder::FixtureEmbedder(json table) {
    if (!table.is_object()) throw ConfigError("embedding fixture must be a JSON object");
    for (auto& [key, val] : table.items()) {
        std::vector<double> vec;
        for (const auto& x : val) vec.push_back(x.get<double>());
        if (vec.empty()) throw ConfigError("empty embedding vector for: " + key);
        if (dim_ == 0) dim_ = vec.size();
        if (vec.size() != dim_) throw ConfigError("inconsistent embedding dimensions");
        table_.emplace(key, std::move(vec));
    }
    if (table_.empty()) throw ConfigError("embedding fixture is empty");
}

FixtureEmbedder FixtureEmbedder::from_file(const std::filesystem::path& path) {
    return FixtureEmbedder(read_json_file(path));
}

std::vector<double> FixtureEmbedder::embed(const std::string& text) const {
    auto it = table_.find(text);
    if (it == table_.end()) throw ConfigError("embedding fixture has no entry for: " + text);
    return it->second;
}

KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k,
                    std::uint64_t seed, std::size_t max_iters) {
    const std::size_t n = points.size();
    if (k == 0 || k > n) throw ConfigError("kmeans: need 1 <= k <= number of points");
    for (const auto& p : points)
        if (p.size() != points.front().size())
            throw ConfigError("kmeans: inconsistent point dimensions");

    Rng rng(seed);
    KMeansResult res;
    std::vector<std::size_t> center_idx;
    std::vector<char> is_center(n, 0);

    // k-means++ seeding: first center uniform, the rest weighted by squared
    // distance to the nearest chosen center.
    std::size_t first = rng.below(n);
    center_idx.push_back(first);
    is_center[first] = 1;
    std::vector<double> d2(n, 0.0);
    while (center_idx.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c : center_idx) best = std::min(best, sq_dist(points[i], points[c]));
            d2[i] = is_center[i] ? 0.0 : best;
            total += d2[i];
        }
        std::size_t chosen = n;
        if (total > 0.0) {
            double r = rng.unit() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (!is_center[i] && d2[i] > 0.0 && r <= acc) {
                    chosen = i;
                    break;
                }
            }
        }
        if (chosen == n) {
            // All remaining mass is zero (duplicate points): lowest free index.
            for (std::size_t i = 0; i < n; ++i)
                if (!is_center[i]) {
                    chosen = i;
                    break;
                }
        }
        center_idx.push_back(chosen);
        is_center[chosen] = 1;
    }

    res.centroids.reserve(k);
    for (std::size_t c : center_idx) res.centroids.push_back(points[c]);
    res.assignment.assign(n, 0);

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t a = nearest_centroid(points[i], res.centroids);
            if (a != res.assignment[i]) {
                res.assignment[i] = a;
                changed = true;
            }
        }
        res.iterations = iter + 1;
        if (!changed && iter > 0) break;

        std::vector<std::vector<double>> sums(k,
                                              std::vector<double>(points.front().size(), 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[res.assignment[i]];
            for (std::size_t d = 0; d < points[i].size(); ++d)
                sums[res.assignment[i]][d] += points[i][d];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // emptied cluster keeps its centroid
            for (std::size_t d = 0; d < sums[c].size(); ++d)
                res.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
        if (!changed) break;
    }

    res.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        res.inertia += sq_dist(points[i], res.centroids[res.assignment[i]]);
    return res;
}

RewriteBatch gather_rewrites(const std::string& seed_text, RewriteProvider& provider,
                             std::size_t n) {
    auto required = placeholders(seed_text);
    RewriteBatch batch;
    if (n == 0) return batch;
    std::vector<std::string> candidates = provider.rewrites(seed_text, n);
    batch.total = candidates.size();
    std::unordered_set<std::string> seen{seed_text};
    for (auto& c : candidates) {
        auto slots = try_placeholders(c);
        bool ok = slots.has_value() && *slots == required && !c.empty() && !seen.count(c);
        if (!ok) {
            batch.dropped.push_back(c);
            continue;
        }
        seen.insert(c);
        batch.candidates.push_back(std::move(c));
    }
    return batch;
}

std::vector<std::string> select_representatives(const std::vector<std::string>& candidates,
                                                const Embedder& embedder, std::size_t k,
                                                std::uint64_t seed) {
    if (k == 0) throw ConfigError("selection: k must be positive");
    if (candidates.size() < k)
        throw ConfigError("selection: only " + std::to_string(candidates.size()) +
                          " candidates for k=" + std::to_string(k));

    std::vector<std::vector<double>> vecs;
    vecs.reserve(candidates.size());
    for (const auto& c : candidates) vecs.push_back(embedder.embed(c));

    KMeansResult km = kmeans(vecs, k, seed);

    std::vector<char> picked(candidates.size(), 0);
    std::vector<std::size_t> chosen;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t best = candidates.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (picked[i] || km.assignment[i] != c) continue;
            double d = sq_dist(vecs[i], km.centroids[c]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        if (best == candidates.size()) {
            // Cluster came back empty: take the unpicked candidate farthest
            // from everything already selected to keep the set spread out.
            double far_d = -1.0;
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                if (picked[i]) continue;
                double dmin = std::numeric_limits<double>::infinity();
                for (std::size_t j : chosen) dmin = std::min(dmin, sq_dist(vecs[i], vecs[j]));
                if (chosen.empty()) dmin = 0.0;
                if (dmin > far_d) {
                    far_d = dmin;
                    best = i;
                }
            }
        }
        picked[best] = 1;
        chosen.push_back(best);
    }
    std::vector<std::string> out;
    for (std::size_t i : chosen) out.push_back(candidates[i]);
    return out;
}

ExpansionResult expand_instruction(const std::string& seed_text, RewriteProvider& provider,
                                   const Embedder& embedder, std::size_t k, std::uint64_t seed,
                                   std::size_t oversample) {
    if (k == 0) throw ConfigError("expansion: k must be positive");
    std::size_t want = std::max(k * std::max<std::size_t>(oversample, 1), k);
    RewriteBatch batch = gather_rewrites(seed_text, provider, want);

    ExpansionResult res;
    res.candidates_total = batch.total;
    res.candidates_usable = batch.candidates.size();
    res.dropped = std::move(batch.dropped);
    if (batch.candidates.size() < k)
        throw ConfigError("expansion: only " + std::to_string(batch.candidates.size()) +
                          " usable candidates for k=" + std::to_string(k));
    res.selected = select_representatives(batch.candidates, embedder, k,
                                          derive_seed(seed, "expansion-cluster"));
    return res;
}

VariableSpace VariableSpace::load(const std::filesystem::path& path) {
    static const std::set<std::string> kKinds = {"position",    "numeric",
                                                "phrase",      "sentence",
                                                "option_pair", "format_indicator",
                                                "id_list"};
    json j = read_json_file(path);
    VariableSpace space;
    space.task_id = j.value("task", "");
    if (space.task_id.empty())
        throw ConfigError("variable space missing task id: " + path.string());
    if (!j.contains("dimensions") || !j["dimensions"].is_array() || j["dimensions"].empty())
        throw ConfigError("variable space needs a non-empty dimensions array: " + path.string());
    std::set<std::string> names;
    for (const auto& d : j["dimensions"]) {
        VariableDimension dim;
        dim.name = d.value("name", "");
        dim.kind = d.value("kind", "");
        if (dim.name.empty() || !names.insert(dim.name).second)
            throw ConfigError("variable dimension names must be unique and non-empty");
        if (!kKinds.count(dim.kind))
            throw ConfigError("unknown variable kind '" + dim.kind + "' in " + path.string());
        if (!d.contains("candidates") || !d["candidates"].is_array() || d["candidates"].empty())
            throw ConfigError("variable dimension '" + dim.name + "' has no candidates");
        for (const auto& c : d["candidates"]) dim.candidates.push_back(c);
        space.dimensions.push_back(std::move(dim));
    }
    return space;
}

std::size_t VariableSpace::combinations() const {
    std::size_t prod = 1;
    for (const auto& d : dimensions) {
        if (prod > (std::size_t{1} << 40)) return std::size_t{1} << 40;  // saturate
        prod *= d.candidates.size();
    }
    return prod;
}

std::vector<json> sample_variables(const VariableSpace& space, std::size_t n,
                                   std::uint64_t seed) {
    if (n == 0) throw ConfigError("variable sampling: n must be positive");
    std::size_t total = space.combinations();
    if (n > total)
        throw ConfigError("variable sampling: requested " + std::to_string(n) +
                          " assignments from a space of " + std::to_string(total));

    Rng rng(seed);
    const std::size_t ndim = space.dimensions.size();

    // Repeated-permutation draw from an index set: usage counts differ by at
    // most one and, when count < |set|, the used subset is random.
    auto permuted_fill = [](const std::vector<std::size_t>& idx, std::size_t count, Rng& r) {
        std::vector<std::size_t> out;
        while (out.size() < count) {
            std::vector<std::size_t> perm = idx;
            r.shuffle(perm);
            for (std::size_t v : perm) {
                if (out.size() >= count) break;
                out.push_back(v);
            }
        }
        return out;
    };

    auto balanced_column = [&](std::size_t d, Rng& r) {
        const auto& dim = space.dimensions[d];
        const std::size_t m = dim.candidates.size();
        std::vector<std::size_t> col;
        if (dim.kind == "position") {
            // Stratify over sections: the middle gets roughly half the draws,
            // the rest splits between beginning and end, and every section is
            // covered once n >= 3.
            std::map<std::string, std::vector<std::size_t>> sections;
            for (std::size_t i = 0; i < m; ++i) {
                const auto& c = dim.candidates[i];
                std::string s = c.is_object() ? c.value("section", "") : "";
                if (s != "beginning" && s != "middle" && s != "end")
                    throw ConfigError(
                        "position dimension '" + dim.name +
                        "' must label every candidate with section beginning/middle/end");
                sections[s].push_back(i);
            }
            const auto beg = sections.find("beginning");
            const auto mid = sections.find("middle");
            const auto end = sections.find("end");
            if (sections.size() != 3)
                throw ConfigError("position dimension '" + dim.name +
                                  "' must cover all three sections");
            std::size_t q_mid = std::max<std::size_t>(1, (n + 1) / 2);
            std::size_t q_beg = (n - q_mid + 1) / 2;
            std::size_t q_end = n - q_mid - q_beg;
            while (q_end == 0 && n >= 3 && q_mid > 1) {
                --q_mid;
                ++q_end;
            }
            auto part_b = permuted_fill(beg->second, q_beg, r);
            auto part_m = permuted_fill(mid->second, q_mid, r);
            auto part_e = permuted_fill(end->second, q_end, r);
            col.insert(col.end(), part_b.begin(), part_b.end());
            col.insert(col.end(), part_m.begin(), part_m.end());
            col.insert(col.end(), part_e.begin(), part_e.end());
            r.shuffle(col);
            return col;
        }
        std::vector<std::size_t> all(m);
        for (std::size_t i = 0; i < m; ++i) all[i] = i;
        col = permuted_fill(all, n, r);
        return col;
    };

    std::vector<std::vector<std::size_t>> columns;
    for (std::size_t d = 0; d < ndim; ++d) {
        Rng r = rng.fork(d + 1);
        columns.push_back(balanced_column(d, r));
    }

    auto distinct = [&]() {
        std::set<std::vector<std::size_t>> seen;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::size_t> row(ndim);
            for (std::size_t d = 0; d < ndim; ++d) row[d] = columns[d][i];
            if (!seen.insert(row).second) return false;
        }
        return true;
    };

    bool ok = distinct();
    for (std::size_t attempt = 0; !ok && attempt < 200; ++attempt) {
        Rng r = rng.fork(1000 + attempt);
        columns[attempt % ndim] = balanced_column(attempt % ndim, r);
        ok = distinct();
    }

    std::vector<json> out;
    if (ok) {
        for (std::size_t i = 0; i < n; ++i) {
            json row = json::object();
            for (std::size_t d = 0; d < ndim; ++d)
                row[space.dimensions[d].name] = space.dimensions[d].candidates[columns[d][i]];
            out.push_back(std::move(row));
        }
        return out;
    }

    // Tiny space: enumerate every combination, shuffle, take the first n. This
    // forfeits perfect per-dimension balance but preserves distinctness.
    if (total > 100000)
        throw ConfigError("variable sampling: failed to draw distinct assignments");
    std::vector<std::vector<std::size_t>> rows;
    std::vector<std::size_t> radix(ndim);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (std::size_t d = 0; d < ndim; ++d) {
            std::size_t m = space.dimensions[d].candidates.size();
            radix[d] = rem % m;
            rem /= m;
        }
        rows.push_back(radix);
    }
    rng.shuffle(rows);
    for (std::size_t i = 0; i < n; ++i) {
        json row = json::object();
        for (std::size_t d = 0; d < ndim; ++d)
            row[space.dimensions[d].name] = space.dimensions[d].candidates[rows[i][d]];
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace lcif::expansion
