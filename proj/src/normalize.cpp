#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "bibmatch/index.hpp"

namespace bibmatch {

namespace {

// Decodes one UTF-8 sequence starting at text[i]; returns the code point and
// advances len. Invalid bytes decode as U+FFFD of length 1.
std::uint32_t decode_utf8(std::string_view text, std::size_t i, std::size_t& len) {
    const auto byte = [&](std::size_t k) { return static_cast<std::uint8_t>(text[k]); };
    std::uint8_t b0 = byte(i);
    if (b0 < 0x80) {
        len = 1;
        return b0;
    }
    auto cont = [&](std::size_t k) {
        return i + k < text.size() && (byte(i + k) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        len = 2;
        return (std::uint32_t(b0 & 0x1F) << 6) | (byte(i + 1) & 0x3F);
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        len = 3;
        return (std::uint32_t(b0 & 0x0F) << 12) | (std::uint32_t(byte(i + 1) & 0x3F) << 6)
               | (byte(i + 2) & 0x3F);
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        len = 4;
        return (std::uint32_t(b0 & 0x07) << 18) | (std::uint32_t(byte(i + 1) & 0x3F) << 12)
               | (std::uint32_t(byte(i + 2) & 0x3F) << 6) | (byte(i + 3) & 0x3F);
    }
    len = 1;
    return 0xFFFD;
}

// ASCII fold for Latin-1 Supplement and Latin Extended-A letters.
// Returns nullptr when no fold exists.
const char* fold_codepoint(std::uint32_t cp) {
    // Latin-1 Supplement: uppercase block maps like the lowercase one.
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) cp += 0x20;
    switch (cp) {
        case 0xE0: case 0xE1: case 0xE2: case 0xE3: case 0xE4: case 0xE5: return "a";
        case 0xE6: return "ae";
        case 0xE7: return "c";
        case 0xE8: case 0xE9: case 0xEA: case 0xEB: return "e";
        case 0xEC: case 0xED: case 0xEE: case 0xEF: return "i";
        case 0xF0: return "d";
        case 0xF1: return "n";
        case 0xF2: case 0xF3: case 0xF4: case 0xF5: case 0xF6: case 0xF8: return "o";
        case 0xF9: case 0xFA: case 0xFB: case 0xFC: return "u";
        case 0xFD: case 0xFF: return "y";
        case 0xFE: return "th";
        case 0xDF: case 0x1E9E: return "ss";
        default: break;
    }
    if (cp >= 0x100 && cp <= 0x17F) {
        if (cp <= 0x105) return "a";
        if (cp <= 0x10D) return "c";
        if (cp <= 0x111) return "d";
        if (cp <= 0x11B) return "e";
        if (cp <= 0x123) return "g";
        if (cp <= 0x127) return "h";
        if (cp <= 0x131) return "i";
        if (cp <= 0x133) return "ij";
        if (cp <= 0x135) return "j";
        if (cp <= 0x138) return "k";
        if (cp <= 0x142) return "l";
        if (cp <= 0x14B) return "n";
        if (cp <= 0x151) return "o";
        if (cp <= 0x153) return "oe";
        if (cp <= 0x159) return "r";
        if (cp <= 0x161) return "s";
        if (cp <= 0x167) return "t";
        if (cp <= 0x173) return "u";
        if (cp <= 0x175) return "w";
        if (cp <= 0x178) return "y";
        if (cp <= 0x17E) return "z";
        return "s";  // U+017F long s
    }
    switch (cp) {
        case 0x218: case 0x219: return "s";  // Romanian comma-below
        case 0x21A: case 0x21B: return "t";
        default: return nullptr;
    }
}

// Fixed stopword list, stored post-fold (lowercase ASCII): roughly 150
// English plus 50 German function words. Changing it changes tokenization
// and therefore every retrieval score downstream.
const std::unordered_set<std::string>& stopword_set() {
    static const std::unordered_set<std::string> words = {
        // English
        "a", "about", "above", "after", "again", "against", "all", "along", "also", "although",
        "am", "among", "amongst", "an", "and", "any", "are", "as", "at", "be", "because", "been",
        "before", "being", "below", "between", "both", "but", "by", "can", "cannot", "could",
        "did", "do", "does", "doing", "down", "during", "each", "either", "etc", "few", "for",
        "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself",
        "him", "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself",
        "just", "me", "more", "most", "must", "my", "myself", "neither", "no", "nor", "not",
        "now", "of", "off", "on", "once", "only", "onto", "or", "other", "our", "ours",
        "ourselves", "out", "over", "own", "per", "same", "shall", "she", "should", "since",
        "so", "some", "such", "than", "that", "the", "their", "theirs", "them", "themselves",
        "then", "there", "these", "they", "this", "those", "though", "through", "thus", "to",
        "too", "toward", "towards", "under", "until", "unto", "up", "upon", "very", "via",
        "was", "we", "were", "what", "when", "where", "whether", "which", "while", "who",
        "whom", "whose", "why", "will", "with", "within", "without", "would", "yet", "you",
        "your", "yours", "yourself", "yourselves",
        // German (folded forms: fuer -> fur, ueber -> uber)
        "aber", "als", "am", "auch", "auf", "aus", "bei", "beim", "bis", "das", "dass", "dem",
        "den", "der", "des", "dessen", "die", "diese", "durch", "ein", "eine", "einem", "einen",
        "einer", "eines", "fur", "gegen", "im", "ist", "mit", "nach", "nicht", "noch", "nur",
        "oder", "ohne", "sich", "sein", "seine", "sind", "sowie", "uber", "um", "und", "unter",
        "vom", "von", "vor", "wie", "zu", "zum", "zur", "zwischen",
    };
    return words;
}

}  // namespace

bool is_stopword(std::string_view folded_token) {
    return stopword_set().count(std::string(folded_token)) > 0;
}

std::string fold_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t len = 0;
        std::uint32_t cp = decode_utf8(text, i, len);
        if (cp < 0x80) {
            char c = static_cast<char>(cp);
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            out.push_back(c);
        } else if (const char* fold = fold_codepoint(cp)) {
            out += fold;
        } else {
            out.append(text.substr(i, len));
        }
        i += len;
    }
    return out;
}

std::vector<std::string> normalize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2 && !is_stopword(current)) tokens.push_back(current);
        current.clear();
    };
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t len = 0;
        std::uint32_t cp = decode_utf8(text, i, len);
        if (cp < 0x80) {
            char c = static_cast<char>(cp);
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))
                current.push_back(c);
            else
                flush();
        } else if (const char* fold = fold_codepoint(cp)) {
            current += fold;
        } else {
            flush();
        }
        i += len;
    }
    flush();
    return tokens;
}

}  // namespace bibmatch
