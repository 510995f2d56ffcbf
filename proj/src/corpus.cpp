#include "lcif/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "lcif/errors.hpp"
#include "lcif/synth_text.hpp"

namespace lcif::corpus {
namespace {

std::string format_uuid(Rng& rng) {
    unsigned char bytes[16];
    for (int i = 0; i < 16; i += 8) {
        std::uint64_t v = rng.next_u64();
        for (int k = 0; k < 8; ++k) bytes[i + k] = static_cast<unsigned char>(v >> (8 * k));
    }
    bytes[6] = static_cast<unsigned char>((bytes[6] & 0x0f) | 0x40);  // version 4
    bytes[8] = static_cast<unsigned char>((bytes[8] & 0x3f) | 0x80);  // variant
    static const char* hexd = "0123456789abcdef";
    std::string out;
    out.reserve(36);
    for (int i = 0; i < 16; ++i) {
        if (i == 4 || i == 6 || i == 8 || i == 10) out += '-';
        out += hexd[bytes[i] >> 4];
        out += hexd[bytes[i] & 0xf];
    }
    return out;
}

std::string random_hex(Rng& rng, int digits) {
    static const char* hexd = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < digits; ++i) out += hexd[rng.below(16)];
    return out;
}

// Document text landing in [min_tokens, max_tokens]; sentences are ~10-30
// tokens so growing past min can never overshoot a 200-token-wide window.
std::string synth_doc_text(Rng& rng, const Tokenizer& tok, std::size_t min_tokens,
                           std::size_t max_tokens) {
    std::string text;
    std::size_t count = 0;
    while (count < min_tokens) {
        std::string s = synth::sentence(rng);
        std::size_t c = tok.count_tokens(text.empty() ? s : " " + s);
        if (count + c > max_tokens) continue;  // extremely rare; redraw
        if (!text.empty()) text += ' ';
        text += s;
        count += c;
    }
    return text;
}

}  // namespace

std::vector<std::string> ingest_texts(const std::filesystem::path& file, IngestMode mode) {
    std::string data = read_file(file);
    std::vector<std::string> out;
    if (mode == IngestMode::Lines) {
        std::size_t pos = 0;
        while (pos <= data.size()) {
            std::size_t eol = data.find('\n', pos);
            if (eol == std::string::npos) eol = data.size();
            std::string line = data.substr(pos, eol - pos);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) out.push_back(std::move(line));
            if (eol == data.size()) break;
            pos = eol + 1;
        }
    } else {
        std::size_t pos = 0;
        std::string current;
        auto flush = [&] {
            while (!current.empty() && (current.back() == '\n' || current.back() == ' '))
                current.pop_back();
            if (!current.empty()) out.push_back(std::move(current));
            current.clear();
        };
        while (pos <= data.size()) {
            std::size_t eol = data.find('\n', pos);
            if (eol == std::string::npos) eol = data.size();
            std::string line = data.substr(pos, eol - pos);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            bool blank = line.find_first_not_of(" \t") == std::string::npos;
            if (blank) {
                flush();
            } else {
                if (!current.empty()) current += '\n';
                current += line;
            }
            if (eol == data.size()) break;
            pos = eol + 1;
        }
        flush();
    }
    return out;
}

ListPool build_list_pool(const ListPoolParams& params, std::uint64_t seed, const Tokenizer& tok,
                         const std::vector<std::string>& texts) {
    if (params.min_tokens == 0 || params.max_tokens < params.min_tokens)
        throw ConfigError("list pool: invalid token range");
    Rng rng(derive_seed(seed, "list_pool"));
    ListPool pool;
    pool.seed = seed;
    std::unordered_set<std::string> seen;

    for (std::size_t i = 0; i < params.n_uuid; ++i) {
        std::string u = format_uuid(rng);
        while (!seen.insert(u).second) u = format_uuid(rng);
        pool.elements.push_back({u, "uuid", tok.count_tokens(u)});
    }

    if (!texts.empty()) {
        std::size_t taken = 0;
        for (const auto& t : texts) {
            if (taken >= params.n_text) break;
            std::size_t c = tok.count_tokens(t);
            if (c < params.min_tokens || c > params.max_tokens) continue;
            if (!seen.insert(t).second) continue;
            pool.elements.push_back({t, "text", c});
            ++taken;
        }
        if (taken < params.n_text)
            throw ConfigError("list pool: supplied texts yield only " + std::to_string(taken) +
                              " usable elements of " + std::to_string(params.n_text));
    } else {
        for (std::size_t i = 0; i < params.n_text; ++i) {
            for (int attempt = 0;; ++attempt) {
                if (attempt > 1000) throw ConfigError("list pool: cannot satisfy token range");
                std::string t = synth::instruction_phrase(rng);
                std::size_t c = tok.count_tokens(t);
                if (c < params.min_tokens || c > params.max_tokens) continue;
                if (!seen.insert(t).second) continue;
                pool.elements.push_back({t, "text", c});
                break;
            }
        }
    }
    rng.shuffle(pool.elements);
    return pool;
}

std::string render_doc(const DocRecord& doc) {
    nlohmann::ordered_json j;
    j["text"] = doc.text;
    j["id"] = doc.id;
    j["iD2"] = doc.id2;
    if (doc.title) j["title"] = *doc.title;
    j["date"] = doc.date;
    if (doc.source) j["source"] = *doc.source;
    return j.dump();
}

DocPool build_doc_pool(const DocPoolParams& params, std::uint64_t seed, const Tokenizer& tok,
                       const std::vector<std::string>& texts) {
    if (params.duplication_rate < 0.0 || params.duplication_rate > 1.0)
        throw ConfigError("doc pool: duplication_rate outside [0,1]");
    const std::size_t n = params.n_docs;
    if (n == 0) throw ConfigError("doc pool: n_docs must be positive");
    Rng rng(derive_seed(seed, "doc_pool"));

    // Duplication quota: exactly this many documents share text with another.
    std::size_t quota = static_cast<std::size_t>(std::lround(static_cast<double>(n) * params.duplication_rate));
    if (quota == 1) quota = std::min<std::size_t>(2, n);
    if (quota > n) quota = n;

    // Group sizes: pairs, with one triple absorbing an odd remainder.
    std::vector<std::size_t> group_sizes;
    if (quota >= 2) {
        std::size_t remaining = quota;
        if (remaining % 2 == 1) {
            group_sizes.push_back(3);
            remaining -= 3;
        }
        while (remaining >= 2) {
            group_sizes.push_back(2);
            remaining -= 2;
        }
    }

    const std::size_t n_groups = group_sizes.size();
    const std::size_t n_distinct = (n - quota) + n_groups;

    std::vector<std::string> distinct_texts;
    if (!texts.empty()) {
        std::unordered_set<std::string> seen;
        for (const auto& t : texts) {
            if (distinct_texts.size() >= n_distinct) break;
            std::size_t c = tok.count_tokens(t);
            if (c < params.min_tokens || c > params.max_tokens) continue;
            if (!seen.insert(t).second) continue;
            distinct_texts.push_back(t);
        }
        if (distinct_texts.size() < n_distinct)
            throw ConfigError("doc pool: supplied texts yield only " +
                              std::to_string(distinct_texts.size()) + " usable of " +
                              std::to_string(n_distinct));
    } else {
        std::unordered_set<std::string> seen;
        while (distinct_texts.size() < n_distinct) {
            std::string t = synth_doc_text(rng, tok, params.min_tokens, params.max_tokens);
            if (!seen.insert(t).second) continue;
            distinct_texts.push_back(std::move(t));
        }
    }

    // Which document slots receive group texts.
    std::vector<std::size_t> slots(n);
    for (std::size_t i = 0; i < n; ++i) slots[i] = i;
    rng.shuffle(slots);

    std::vector<std::string> slot_text(n);
    std::vector<int> slot_group(n, -1);
    std::size_t cursor = 0;
    std::size_t text_idx = 0;
    for (std::size_t g = 0; g < n_groups; ++g) {
        for (std::size_t k = 0; k < group_sizes[g]; ++k) {
            slot_text[slots[cursor]] = distinct_texts[text_idx];
            slot_group[slots[cursor]] = static_cast<int>(g);
            ++cursor;
        }
        ++text_idx;
    }
    for (; cursor < n; ++cursor, ++text_idx) slot_text[slots[cursor]] = distinct_texts[text_idx];

    DocPool pool;
    pool.seed = seed;
    pool.duplication_rate = params.duplication_rate;
    std::unordered_set<std::string> used_ids, used_id2;
    for (std::size_t i = 0; i < n; ++i) {
        DocRecord d;
        d.text = slot_text[i];
        d.dup_group = slot_group[i];
        do d.id = "doc-" + random_hex(rng, 8);
        while (!used_ids.insert(d.id).second);
        do d.id2 = "D2-" + random_hex(rng, 8);
        while (!used_id2.insert(d.id2).second);
        if (!rng.chance(params.title_omit_prob)) d.title = synth::title(rng);
        d.date = synth::date(rng);
        if (!rng.chance(params.source_omit_prob)) d.source = rng.pick(synth::source_labels());
        d.token_count = tok.count_tokens(render_doc(d));
        pool.docs.push_back(std::move(d));
    }
    return pool;
}

std::vector<std::string> default_sentence_splitter(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto is_space = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    };
    while (i < n) {
        while (i < n && is_space(text[i])) ++i;
        if (i >= n) break;
        std::size_t start = i;
        std::size_t end = n;
        for (std::size_t j = i; j < n; ++j) {
            char c = text[j];
            if (c == '.' || c == '!' || c == '?') {
                std::size_t k = j;
                while (k + 1 < n && (text[k + 1] == '.' || text[k + 1] == '!' || text[k + 1] == '?'))
                    ++k;
                if (k + 1 >= n || is_space(text[k + 1])) {
                    end = k + 1;
                    break;
                }
            }
        }
        out.emplace_back(text.substr(start, end - start));
        i = end;
    }
    return out;
}

std::string strip_tags(std::string_view tagged) {
    static const std::string_view open_prefix = "[[KEY|";
    static const std::string_view close_marker = " [[/KEY]]";
    std::string out;
    out.reserve(tagged.size());
    std::size_t i = 0;
    while (i < tagged.size()) {
        if (tagged.compare(i, open_prefix.size(), open_prefix) == 0) {
            std::size_t close = tagged.find("]] ", i);
            if (close != std::string_view::npos) {
                i = close + 3;
                continue;
            }
        }
        if (tagged.compare(i, close_marker.size(), close_marker) == 0) {
            i += close_marker.size();
            continue;
        }
        out += tagged[i++];
    }
    return out;
}

LongDoc build_long_doc(const LongDocParams& params, std::uint64_t seed, const Tokenizer& tok,
                       const std::vector<std::string>& essays, const SentenceSplitter& splitter) {
    if (params.target_tokens == 0) throw ConfigError("long doc: target_tokens must be positive");
    if (params.tag_fraction <= 0.0 || params.tag_fraction > 1.0)
        throw ConfigError("long doc: tag_fraction outside (0,1]");
    if (params.tag_types.empty()) throw ConfigError("long doc: no tag types");
    if (essays.empty()) throw ConfigError("long doc: essay pool is empty");

    Rng rng(derive_seed(seed, "long_doc"));

    // Flatten the essay pool into distinct sentences, remembering essay starts
    // so paragraph breaks survive.
    struct Unit {
        std::string text;
        bool essay_start;
        std::size_t plain_tokens;
    };
    std::vector<Unit> units;
    std::unordered_set<std::string> seen;
    std::size_t plain_total = 0;
    for (const auto& essay : essays) {
        bool first = true;
        for (auto& s : splitter(essay)) {
            if (!seen.insert(s).second) continue;
            std::size_t c = tok.count_tokens(first && !units.empty() ? "\n\n" + s : " " + s);
            units.push_back({std::move(s), first, c});
            plain_total += c;
            first = false;
        }
        if (plain_total > params.target_tokens + 512) break;  // enough material gathered
    }
    if (units.empty()) throw ConfigError("long doc: essays contain no sentences");

    // Initial cut: plain token total up to the target.
    std::size_t n_take = 0;
    std::size_t acc = 0;
    while (n_take < units.size() && acc + units[n_take].plain_tokens <= params.target_tokens) {
        acc += units[n_take].plain_tokens;
        ++n_take;
    }
    if (n_take == 0) throw ConfigError("long doc: target_tokens smaller than one sentence");

    auto assemble = [&](std::size_t n) {
        LongDoc doc;
        // Choose tagged sentence positions and assign ids in shuffled order so
        // id sort order differs from document order.
        std::size_t k = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::lround(params.tag_fraction * static_cast<double>(n))));
        k = std::min(k, n);
        Rng pick_rng(derive_seed(seed, "long_doc_tags/" + std::to_string(n)));
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        pick_rng.shuffle(order);
        std::vector<std::size_t> tagged(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(tagged.begin(), tagged.end());
        std::vector<std::size_t> id_perm(k);
        for (std::size_t i = 0; i < k; ++i) id_perm[i] = i;
        pick_rng.shuffle(id_perm);
        int width = k >= 100 ? 3 : 2;

        std::vector<int> tag_of(n, -1);
        doc.tags.resize(k);
        for (std::size_t t = 0; t < k; ++t) {
            std::size_t sent_idx = tagged[t];
            char buf[16];
            std::snprintf(buf, sizeof buf, "K%0*zu", width, id_perm[t] + 1);
            doc.tags[t].id = buf;
            doc.tags[t].type = params.tag_types[pick_rng.below(params.tag_types.size())];
            tag_of[sent_idx] = static_cast<int>(t);
        }

        for (std::size_t i = 0; i < n; ++i) {
            const Unit& u = units[i];
            if (i > 0) doc.text += u.essay_start ? "\n\n" : " ";
            int t = tag_of[i];
            DocSentence ds;
            ds.text = u.text;
            ds.tag_index = t;
            if (t >= 0) {
                doc.text += "[[KEY|" + doc.tags[static_cast<std::size_t>(t)].type + "|" +
                            doc.tags[static_cast<std::size_t>(t)].id + "]] ";
            }
            ds.start = doc.text.size();
            doc.text += u.text;
            ds.end = doc.text.size();
            if (t >= 0) {
                doc.text += " [[/KEY]]";
                auto& tag = doc.tags[static_cast<std::size_t>(t)];
                tag.sentence = u.text;
                tag.start = ds.start;
                tag.end = ds.end;
            }
            doc.sentences.push_back(std::move(ds));
        }
        doc.token_count = tok.count_tokens(doc.text);
        return doc;
    };

    LongDoc doc = assemble(n_take);
    // Marker overhead pushed the real count past the target; shed sentences in
    // estimated chunks, then settle one at a time.
    while (doc.token_count > params.target_tokens && n_take > 1) {
        std::size_t over = doc.token_count - params.target_tokens;
        std::size_t avg = std::max<std::size_t>(1, doc.token_count / n_take);
        std::size_t drop = std::max<std::size_t>(1, over / avg);
        n_take = drop >= n_take ? 1 : n_take - drop;
        doc = assemble(n_take);
    }
    // Top back up if we can fit more whole sentences.
    while (n_take < units.size()) {
        std::size_t next_cost = units[n_take].plain_tokens + 16;  // worst-case marker share
        if (doc.token_count + next_cost > params.target_tokens) break;
        ++n_take;
        LongDoc bigger = assemble(n_take);
        if (bigger.token_count > params.target_tokens) {
            --n_take;
            doc = assemble(n_take);
            break;
        }
        doc = std::move(bigger);
    }
    if (doc.token_count > params.target_tokens)
        throw ConfigError("long doc: cannot fit target_tokens");
    return doc;
}

EssayPool build_essay_pool(std::size_t n_essays, std::uint64_t seed) {
    Rng rng(derive_seed(seed, "essay_pool"));
    EssayPool pool;
    pool.seed = seed;
    for (std::size_t i = 0; i < n_essays; ++i) {
        int paras = static_cast<int>(6 + rng.below(4));
        int sents = static_cast<int>(5 + rng.below(4));
        pool.texts.push_back(synth::essay(rng, paras, sents));
    }
    return pool;
}

// ---- persistence --------------------------------------------------------

void save_list_pool(const ListPool& pool, const std::filesystem::path& file) {
    JsonlWriter w(file);
    for (const auto& e : pool.elements)
        w.append({{"value", e.value}, {"kind", e.kind}, {"token_count", e.token_count}});
    w.finish({{"pool", "list"}, {"seed", pool.seed}});
}

ListPool load_list_pool(const std::filesystem::path& file) {
    ListPool pool;
    json manifest = read_json_file(manifest_path_for(file));
    pool.seed = manifest.value("seed", 0ULL);
    for_each_jsonl(file, [&](json&& j) {
        pool.elements.push_back({j.at("value").get<std::string>(), j.at("kind").get<std::string>(),
                                 j.at("token_count").get<std::size_t>()});
    });
    return pool;
}

void save_doc_pool(const DocPool& pool, const std::filesystem::path& file) {
    JsonlWriter w(file);
    for (const auto& d : pool.docs) {
        json j{{"text", d.text},       {"id", d.id},           {"iD2", d.id2},
               {"date", d.date},       {"token_count", d.token_count},
               {"dup_group", d.dup_group}};
        if (d.title) j["title"] = *d.title;
        if (d.source) j["source"] = *d.source;
        w.append(j);
    }
    w.finish({{"pool", "docs"}, {"seed", pool.seed}, {"duplication_rate", pool.duplication_rate}});
}

DocPool load_doc_pool(const std::filesystem::path& file) {
    DocPool pool;
    json manifest = read_json_file(manifest_path_for(file));
    pool.seed = manifest.value("seed", 0ULL);
    pool.duplication_rate = manifest.value("duplication_rate", 0.0);
    for_each_jsonl(file, [&](json&& j) {
        DocRecord d;
        d.text = j.at("text").get<std::string>();
        d.id = j.at("id").get<std::string>();
        d.id2 = j.at("iD2").get<std::string>();
        if (j.contains("title")) d.title = j["title"].get<std::string>();
        d.date = j.at("date").get<std::string>();
        if (j.contains("source")) d.source = j["source"].get<std::string>();
        d.token_count = j.at("token_count").get<std::size_t>();
        d.dup_group = j.at("dup_group").get<int>();
        pool.docs.push_back(std::move(d));
    });
    return pool;
}

void save_essay_pool(const EssayPool& pool, const std::filesystem::path& file) {
    JsonlWriter w(file);
    for (const auto& t : pool.texts) w.append({{"text", t}});
    w.finish({{"pool", "essays"}, {"seed", pool.seed}});
}

EssayPool load_essay_pool(const std::filesystem::path& file) {
    EssayPool pool;
    json manifest = read_json_file(manifest_path_for(file));
    pool.seed = manifest.value("seed", 0ULL);
    for_each_jsonl(file, [&](json&& j) { pool.texts.push_back(j.at("text").get<std::string>()); });
    return pool;
}

}  // namespace lcif::corpus
