#ifndef COORDGRAPH_PSL_HPP
#define COORDGRAPH_PSL_HPP

#include <vector>
#include <cstring>
#include <string>
#include <string_view>
#include <unordered_set>

#include "coordgraph/common.hpp"

namespace coordgraph::psl {

// Vendored snapshot of the public suffix list (ICANN section). Single-label
// TLDs fall under the implicit "*" rule, so only multi-label rules, wildcard
// rules, and exceptions need enumerating. Kept offline so domain extraction
// is bit-reproducible.
inline const std::vector<const char*>& snapshot() {
    static const std::vector<const char*> rules = {
        // uk
        "co.uk", "org.uk", "net.uk", "ac.uk", "gov.uk", "me.uk", "ltd.uk",
        "plc.uk", "sch.uk", "nhs.uk", "police.uk",
        // au
        "com.au", "net.au", "org.au", "edu.au", "gov.au", "asn.au", "id.au",
        // jp
        "co.jp", "or.jp", "ne.jp", "ac.jp", "ad.jp", "ed.jp", "go.jp", "gr.jp", "lg.jp",
        // br
        "com.br", "net.br", "org.br", "gov.br", "edu.br", "mil.br", "art.br", "blog.br",
        // in
        "co.in", "net.in", "org.in", "firm.in", "gen.in", "ind.in", "ac.in",
        "edu.in", "res.in", "gov.in", "mil.in", "nic.in",
        // cn
        "com.cn", "net.cn", "org.cn", "gov.cn", "edu.cn", "ac.cn", "mil.cn",
        // kr
        "co.kr", "or.kr", "ne.kr", "re.kr", "go.kr", "ac.kr", "pe.kr", "mil.kr",
        // mx
        "com.mx", "net.mx", "org.mx", "gob.mx", "edu.mx",
        // ar
        "com.ar", "net.ar", "org.ar", "gob.ar", "edu.ar", "int.ar", "mil.ar",
        // tr
        "com.tr", "net.tr", "org.tr", "gov.tr", "edu.tr", "bel.tr", "mil.tr", "web.tr",
        // za
        "co.za", "net.za", "org.za", "gov.za", "ac.za", "web.za", "edu.za", "mil.za",
        // sg
        "com.sg", "net.sg", "org.sg", "edu.sg", "gov.sg",
        // hk
        "com.hk", "net.hk", "org.hk", "edu.hk", "gov.hk", "idv.hk",
        // tw
        "com.tw", "net.tw", "org.tw", "edu.tw", "gov.tw", "idv.tw", "mil.tw",
        // nz
        "co.nz", "net.nz", "org.nz", "govt.nz", "ac.nz", "geek.nz", "gen.nz",
        "kiwi.nz", "maori.nz", "school.nz", "iwi.nz", "mil.nz",
        // ua
        "com.ua", "net.ua", "org.ua", "gov.ua", "edu.ua", "in.ua", "kiev.ua",
        // il
        "co.il", "org.il", "net.il", "ac.il", "gov.il", "muni.il", "k12.il", "idf.il",
        // sa
        "com.sa", "net.sa", "org.sa", "gov.sa", "edu.sa", "med.sa", "pub.sa", "sch.sa",
        // eg
        "com.eg", "net.eg", "org.eg", "gov.eg", "edu.eg", "sci.eg", "eun.eg", "mil.eg",
        // id
        "co.id", "or.id", "net.id", "web.id", "ac.id", "sch.id", "go.id",
        "mil.id", "my.id", "biz.id",
        // my
        "com.my", "net.my", "org.my", "gov.my", "edu.my", "mil.my", "name.my",
        // ph
        "com.ph", "net.ph", "org.ph", "gov.ph", "edu.ph", "ngo.ph", "mil.ph", "i.ph",
        // pk
        "com.pk", "net.pk", "org.pk", "gov.pk", "edu.pk", "fam.pk", "biz.pk",
        "web.pk", "gok.pk", "gop.pk",
        // vn
        "com.vn", "net.vn", "org.vn", "gov.vn", "edu.vn", "int.vn", "ac.vn",
        "biz.vn", "info.vn", "name.vn", "pro.vn", "health.vn",
        // th
        "co.th", "or.th", "net.th", "ac.th", "go.th", "in.th", "mi.th",
        // ng
        "com.ng", "net.ng", "org.ng", "gov.ng", "edu.ng", "name.ng", "sch.ng", "mobi.ng",
        // ke
        "co.ke", "or.ke", "ne.ke", "go.ke", "ac.ke", "sc.ke", "me.ke", "mobi.ke", "info.ke",
        // ve, co, pe, cl, ec, uy
        "co.ve", "com.ve", "net.ve", "org.ve", "gob.ve", "edu.ve", "mil.ve", "web.ve",
        "com.co", "net.co", "org.co", "gov.co", "edu.co", "mil.co", "nom.co",
        "com.pe", "net.pe", "org.pe", "gob.pe", "edu.pe", "mil.pe", "nom.pe",
        "gob.cl", "gov.cl", "co.cl", "mil.cl",
        "com.ec", "net.ec", "org.ec", "gob.ec", "edu.ec", "info.ec", "fin.ec",
        "k12.ec", "med.ec", "mil.ec", "pro.ec",
        "com.uy", "net.uy", "org.uy", "gub.uy", "edu.uy", "mil.uy",
        // at, fr, it, pl, es, pt, gr, ie, hu, ro, rs, by, kz, ca
        "ac.at", "co.at", "gv.at", "or.at",
        "gouv.fr", "asso.fr", "nom.fr", "tm.fr", "com.fr", "prd.fr",
        "gov.it", "edu.it",
        "com.pl", "net.pl", "org.pl", "edu.pl", "gov.pl", "info.pl", "waw.pl", "biz.pl",
        "com.es", "nom.es", "org.es", "gob.es", "edu.es",
        "com.pt", "net.pt", "org.pt", "edu.pt", "gov.pt", "int.pt", "publ.pt", "nome.pt",
        "com.gr", "net.gr", "org.gr", "edu.gr", "gov.gr",
        "gov.ie",
        "co.hu", "org.hu", "info.hu", "2000.hu",
        "com.ro", "org.ro", "tm.ro", "nt.ro", "nom.ro", "info.ro", "rec.ro",
        "arts.ro", "firm.ro", "store.ro", "www.ro",
        "co.rs", "org.rs", "edu.rs", "ac.rs", "gov.rs", "in.rs",
        "com.by", "gov.by", "mil.by", "of.by",
        "com.kz", "org.kz", "edu.kz", "gov.kz", "mil.kz", "net.kz",
        "gc.ca", "ab.ca", "bc.ca", "mb.ca", "nb.ca", "nf.ca", "nl.ca", "ns.ca",
        "nt.ca", "nu.ca", "on.ca", "pe.ca", "qc.ca", "sk.ca", "yk.ca",
        // wildcard + exception rules
        "*.bd", "*.ck", "!www.ck", "*.er", "*.fj", "*.fk", "*.jm", "*.kh",
        "*.mm", "*.np", "*.pg",
    };
    return rules;
}

namespace detail {

struct RuleSets {
    std::unordered_set<std::string> exact;
    std::unordered_set<std::string> wildcard;   // stores the part after "*."
    std::unordered_set<std::string> exception;  // stores the part after "!"
};

inline const RuleSets& rule_sets() {
    static const RuleSets sets = [] {
        RuleSets s;
        for (const char* r : snapshot()) {
            std::string_view v(r);
            if (v.size() > 2 && v.substr(0, 2) == "*.") s.wildcard.emplace(v.substr(2));
            else if (!v.empty() && v[0] == '!') s.exception.emplace(v.substr(1));
            else s.exact.emplace(v);
        }
        return s;
    }();
    return sets;
}

inline bool valid_label(std::string_view label) {
    if (label.empty() || label.size() > 63) return false;
    for (char c : label) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                        c == '-' || c == '_';
        if (!ok) return false;
    }
    return label.front() != '-' && label.back() != '-';
}

}  // namespace detail

/// Length in labels of the public suffix of `host`, or 0 if the host itself
/// is invalid. Implements the standard matching algorithm: exceptions beat
/// wildcards beat exact rules beat the implicit "*" default.
inline std::size_t public_suffix_labels(const std::vector<std::string>& labels) {
    const auto& rules = detail::rule_sets();
    std::size_t best = 1;  // implicit "*" rule
    std::string suffix;
    for (std::size_t take = 1; take <= labels.size(); ++take) {
        suffix.clear();
        for (std::size_t i = labels.size() - take; i < labels.size(); ++i) {
            if (!suffix.empty()) suffix += '.';
            suffix += labels[i];
        }
        if (rules.exception.count(suffix)) return take - 1;
        if (rules.exact.count(suffix) && take > best) best = take;
        // "*.foo" matches any label directly left of "foo"
        if (take >= 2) {
            const std::size_t dot = suffix.find('.');
            if (rules.wildcard.count(suffix.substr(dot + 1)) && take > best) best = take;
        }
    }
    return best;
}

/// Registered domain (effective TLD plus one label) of a host, lowercased.
/// Returns "" when the host is malformed, numeric, or is itself a suffix.
inline std::string registered_domain_of_host(std::string host) {
    host = to_lower(std::move(host));
    while (!host.empty() && host.back() == '.') host.pop_back();
    if (host.empty() || host.front() == '[') return "";
    auto labels = split_on(host, '.');
    if (labels.size() < 2) return "";
    bool all_numeric = true;
    for (const auto& l : labels) {
        if (!detail::valid_label(l)) return "";
        for (char c : l)
            if (c < '0' || c > '9') { all_numeric = false; break; }
    }
    if (all_numeric) return "";  // IPv4 literal
    const std::size_t suffix_len = public_suffix_labels(labels);
    if (suffix_len >= labels.size()) return "";  // host is itself a public suffix
    std::string out;
    for (std::size_t i = labels.size() - suffix_len - 1; i < labels.size(); ++i) {
        if (!out.empty()) out += '.';
        out += labels[i];
    }
    return out;
}

/// Pulls the host out of a URL-ish string. Tolerates missing schemes and
/// protocol-relative forms; rejects anything with whitespace in the host.
inline std::string host_of_url(const std::string& url) {
    std::string_view v(url);
    const auto scheme_end = v.find("://");
    if (scheme_end != std::string_view::npos) {
        bool scheme_ok = scheme_end > 0;
        for (std::size_t i = 0; i < scheme_end && scheme_ok; ++i) {
            const char c = v[i];
            scheme_ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
        }
        if (!scheme_ok) return "";
        v.remove_prefix(scheme_end + 3);
    } else if (v.substr(0, 2) == "//") {
        v.remove_prefix(2);
    }
    const auto path = v.find_first_of("/?#");
    if (path != std::string_view::npos) v = v.substr(0, path);
    const auto at = v.rfind('@');
    if (at != std::string_view::npos) v.remove_prefix(at + 1);
    if (!v.empty() && v.front() == '[') return "";  // IPv6 literal
    const auto colon = v.find(':');
    if (colon != std::string_view::npos) v = v.substr(0, colon);
    if (v.find_first_of(" \t") != std::string_view::npos) return "";
    return std::string(v);
}

}  // namespace coordgraph::psl

#endif
