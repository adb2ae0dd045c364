#pragma once

/**
 * English verb orthography for building role questions ("Who injures?",
 * "Who is injured?") and gerund phrasings for the naive baseline
 * ("Is the text about injuring?").
 *
 * Regular endings are produced by rule (-e -> -es/-ed, consonant+y ->
 * -ies/-ied, sibilant -> -es); a table of irregular forms overrides the
 * rules and covers the event vocabulary that needs doubling or suppletion.
 */

#include <string>
#include <string_view>
#include <unordered_map>

#include "util.hpp"

namespace evex::verb {

struct Forms {
    std::string third_person;     // injures
    std::string past_participle;  // injured
    std::string gerund;           // injuring
};

namespace detail {

inline bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

inline bool sibilant_ending(const std::string& v) {
    return str::ends_with(v, "s") || str::ends_with(v, "sh") || str::ends_with(v, "ch") ||
           str::ends_with(v, "x") || str::ends_with(v, "z");
}

inline const std::unordered_map<std::string, Forms>& irregular() {
    static const std::unordered_map<std::string, Forms> table = {
        // event vocabulary needing consonant doubling or suppletion
        {"meet", {"meets", "met", "meeting"}},
        {"write", {"writes", "written", "writing"}},
        {"acquit", {"acquits", "acquitted", "acquitting"}},
        {"transfer", {"transfers", "transferred", "transferring"}},
        {"bear", {"bears", "born", "bearing"}},
        {"be", {"is", "been", "being"}},
        {"begin", {"begins", "begun", "beginning"}},
        {"sit", {"sits", "sat", "sitting"}},
        {"set", {"sets", "set", "setting"}},
        {"get", {"gets", "got", "getting"}},
        {"put", {"puts", "put", "putting"}},
        {"hit", {"hits", "hit", "hitting"}},
        {"stop", {"stops", "stopped", "stopping"}},
        {"plan", {"plans", "planned", "planning"}},
        {"ban", {"bans", "banned", "banning"}},
        {"kidnap", {"kidnaps", "kidnapped", "kidnapping"}},
        {"rob", {"robs", "robbed", "robbing"}},
        {"stab", {"stabs", "stabbed", "stabbing"}},
        {"shoot", {"shoots", "shot", "shooting"}},
        {"fight", {"fights", "fought", "fighting"}},
        {"kill", {"kills", "killed", "killing"}},  // regular; kept for clarity of the set
        {"die", {"dies", "died", "dying"}},
        {"lie", {"lies", "lain", "lying"}},
        {"tie", {"ties", "tied", "tying"}},
        {"flee", {"flees", "fled", "fleeing"}},
        {"see", {"sees", "seen", "seeing"}},
        {"go", {"goes", "gone", "going"}},
        {"do", {"does", "done", "doing"}},
        {"have", {"has", "had", "having"}},
        {"make", {"makes", "made", "making"}},
        {"take", {"takes", "taken", "taking"}},
        {"give", {"gives", "given", "giving"}},
        {"hold", {"holds", "held", "holding"}},
        {"send", {"sends", "sent", "sending"}},
        {"spend", {"spends", "spent", "spending"}},
        {"lead", {"leads", "led", "leading"}},
        {"lend", {"lends", "lent", "lending"}},
        {"pay", {"pays", "paid", "paying"}},
        {"say", {"says", "said", "saying"}},
        {"sell", {"sells", "sold", "selling"}},
        {"buy", {"buys", "bought", "buying"}},
        {"catch", {"catches", "caught", "catching"}},
        {"teach", {"teaches", "taught", "teaching"}},
        {"find", {"finds", "found", "finding"}},
        {"win", {"wins", "won", "winning"}},
        {"lose", {"loses", "lost", "losing"}},
        {"leave", {"leaves", "left", "leaving"}},
        {"hurt", {"hurts", "hurt", "hurting"}},
        {"wound", {"wounds", "wounded", "wounding"}},
    };
    return table;
}

} // namespace detail

inline std::string third_person(const std::string& verb) {
    auto it = detail::irregular().find(verb);
    if (it != detail::irregular().end()) return it->second.third_person;
    if (verb.size() >= 2 && verb.back() == 'y' && !detail::is_vowel(verb[verb.size() - 2]))
        return verb.substr(0, verb.size() - 1) + "ies";
    if (detail::sibilant_ending(verb)) return verb + "es";
    return verb + "s";
}

inline std::string past_participle(const std::string& verb) {
    auto it = detail::irregular().find(verb);
    if (it != detail::irregular().end()) return it->second.past_participle;
    if (!verb.empty() && verb.back() == 'e') return verb + "d";
    if (verb.size() >= 2 && verb.back() == 'y' && !detail::is_vowel(verb[verb.size() - 2]))
        return verb.substr(0, verb.size() - 1) + "ied";
    return verb + "ed";
}

inline std::string gerund(const std::string& verb) {
    auto it = detail::irregular().find(verb);
    if (it != detail::irregular().end()) return it->second.gerund;
    if (str::ends_with(verb, "ie")) return verb.substr(0, verb.size() - 2) + "ying";
    if (verb.size() >= 2 && verb.back() == 'e' && verb[verb.size() - 2] != 'e')
        return verb.substr(0, verb.size() - 1) + "ing";
    return verb + "ing";
}

} // namespace evex::verb
