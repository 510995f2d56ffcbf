#include "lcif/synth_text.hpp"

#include <array>
#include <vector>

namespace lcif::synth {
namespace {

const std::vector<std::string> kNouns = {
    "archive", "drawer", "ledger", "harbor", "channel", "bridge", "orchard", "survey",
    "station", "record", "sample", "reading", "bench", "notebook", "kitchen", "supplier",
    "committee", "appendix", "operator", "instrument", "boundary", "message", "counter",
    "district", "warehouse", "signal", "gauge", "reservoir", "culvert", "terrace",
    "clerk", "researcher", "crew", "farmer", "printer", "window", "garden", "furnace",
    "manifest", "inventory", "shipment", "contract", "meeting", "report", "margin",
    "schedule", "workshop", "library", "corridor", "basement", "rooftop", "pasture",
    "mill", "quarry", "canal", "depot", "junction", "platform", "tunnel", "viaduct",
    "almanac", "bulletin", "census", "charter", "dossier", "gazette", "index", "journal",
    "map", "memo", "minute", "packet", "permit", "receipt", "register", "summary",
    "survey", "tally", "ticket", "voucher", "yardstick", "beacon", "buoy", "cairn",
};

const std::vector<std::string> kVerbs = {
    "records", "carries", "checks", "reports", "collects", "measures", "stores",
    "revises", "confirms", "delivers", "inspects", "labels", "orders", "repairs",
    "counts", "copies", "files", "tracks", "weighs", "maps", "logs", "sorts",
    "reviews", "signals", "schedules", "samples", "stacks", "surveys", "trims",
    "updates", "verifies", "watches", "balances", "catalogs", "drafts", "gathers",
};

const std::vector<std::string> kAdjectives = {
    "steady", "careful", "printed", "narrow", "quiet", "battered", "clean", "early",
    "long", "cold", "plain", "gravel", "small", "patient", "ordinary", "exact",
    "crooked", "distant", "faded", "formal", "heavy", "hollow", "level", "modest",
    "pale", "rough", "sealed", "shallow", "sturdy", "tidy", "weathered", "wooden",
    "annual", "coastal", "municipal", "seasonal", "upstream", "western", "original",
};

const std::vector<std::string> kObjects = {
    "the day's records", "the reference weight", "the morning deliveries",
    "the water level", "each printed label", "the field notes", "the repair list",
    "the grain shipment", "the bridge footings", "its own margin notes",
    "the spare fittings", "the older folders", "the route map", "the second reading",
    "the outgoing mail", "the storm damage", "the late orders", "the survey stakes",
    "the boiler pressure", "the spring schedule", "the fence line", "the tide table",
};

const std::vector<std::string> kClauses = {
    "before the light fades", "after the second bell", "without much ceremony",
    "while the crew waits", "until the ledger balances", "despite the cold",
    "during the early shift", "when the road clears", "once the forms arrive",
    "as the season turns", "through the long winter", "past the old mill",
    "near the lower gate", "beside the pumping station", "behind the freight door",
    "under the east window", "by the end of the week", "against the usual advice",
};

const std::vector<std::string> kImperatives = {
    "check", "sort", "file", "weigh", "label", "count", "copy", "inspect", "stack",
    "deliver", "log", "review", "update", "confirm", "measure", "repair", "trim",
};

const std::vector<std::string> kSources = {
    "Harbor Daily Review", "Field Notes Quarterly", "The District Ledger",
    "Canal Street Bulletin", "The Morning Gazette", "Upstream Almanac",
    "The Survey Record", "Depot Circular", "The Orchard Post",
    "Millworks Chronicle", "The Coastal Register", "Junction Times",
};

std::string cap(std::string s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

std::string noun_phrase(Rng& rng) {
    std::string s = "the ";
    if (rng.chance(0.55)) {
        s += rng.pick(kAdjectives);
        s += ' ';
    }
    s += rng.pick(kNouns);
    return s;
}

}  // namespace

std::string sentence(Rng& rng) {
    std::string s = noun_phrase(rng);
    s += ' ';
    s += rng.pick(kVerbs);
    s += ' ';
    s += rng.pick(kObjects);
    switch (rng.below(4)) {
        case 0:
            break;
        case 1:
            s += ' ';
            s += rng.pick(kClauses);
            break;
        case 2:
            s += ", and ";
            s += noun_phrase(rng);
            s += ' ';
            s += rng.pick(kVerbs);
            s += ' ';
            s += rng.pick(kObjects);
            break;
        default:
            s += ' ';
            s += rng.pick(kClauses);
            s += ", ";
            s += rng.pick(kClauses);
            break;
    }
    s += '.';
    return cap(std::move(s));
}

std::string instruction_phrase(Rng& rng) {
    std::string s = rng.pick(kImperatives);
    s += ' ';
    s += rng.pick(kObjects);
    if (rng.chance(0.6)) {
        s += ' ';
        s += rng.pick(kClauses);
    }
    if (rng.chance(0.35)) {
        s += ", then ";
        s += rng.pick(kImperatives);
        s += ' ';
        s += rng.pick(kObjects);
    }
    s += '.';
    return cap(std::move(s));
}

std::string paragraph(Rng& rng, int n_sentences) {
    std::string p;
    for (int i = 0; i < n_sentences; ++i) {
        if (i) p += ' ';
        p += sentence(rng);
    }
    return p;
}

std::string essay(Rng& rng, int n_paragraphs, int sentences_per_paragraph) {
    std::string e;
    for (int i = 0; i < n_paragraphs; ++i) {
        if (i) e += "\n\n";
        int jitter = static_cast<int>(rng.below(3));
        e += paragraph(rng, sentences_per_paragraph + jitter);
    }
    return e;
}

std::string title(Rng& rng) {
    std::string t = "The ";
    t += cap(rng.pick(kAdjectives));
    t += ' ';
    t += cap(rng.pick(kNouns));
    if (rng.chance(0.4)) {
        t += ' ';
        t += cap(rng.pick(kNouns));
    }
    return t;
}

std::string date(Rng& rng) {
    int year = static_cast<int>(1980 + rng.below(44));
    int month = static_cast<int>(1 + rng.below(12));
    int day = static_cast<int>(1 + rng.below(28));
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

const std::vector<std::string>& source_labels() { return kSources; }

}  // namespace lcif::synth
