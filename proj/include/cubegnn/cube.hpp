#pragma once

// Rubik's cube group core: facelet states, the 12 quarter-turn generators,
// canonical packed keys and Singmaster scramble parsing.
//
// Facelet convention: faces stored in URFDLB order (U: 0-8, R: 9-17,
// F: 18-26, D: 27-35, L: 36-44, B: 45-53), each face row-major as seen by
// an observer facing that face with the cube held F-front / U-top.

#include <array>
#include <cstdint>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cubegnn {

inline constexpr int kNumFacelets = 54;
inline constexpr int kNumColors = 6;
inline constexpr int kNumMoves = 12;
inline constexpr int kGraphDegree = 12;
inline constexpr int kDiameter = 26;  // quarter-turn diameter of the group

// Color codes double as face ids; order fixed by the facelet layout.
enum class Color : std::uint8_t { U = 0, R, F, D, L, B };

inline constexpr char kColorChars[kNumColors + 1] = "URFDLB";

inline char color_char(Color c) { return kColorChars[static_cast<int>(c)]; }

inline int color_from_char(char ch) {
    switch (ch) {
        case 'U': return 0;
        case 'R': return 1;
        case 'F': return 2;
        case 'D': return 3;
        case 'L': return 4;
        case 'B': return 5;
        default: return -1;
    }
}

// One of the 12 generators. Index layout pairs each face with its inverse:
// U=0, U'=1, D=2, D'=3, L=4, L'=5, R=6, R'=7, F=8, F'=9, B=10, B'=11.
// This ordering is also the edge-feature ordering.
class Move {
public:
    constexpr Move() = default;
    constexpr explicit Move(int index) : index_(static_cast<std::uint8_t>(index)) {}

    constexpr int index() const { return index_; }
    constexpr char face() const { return "UDLRFB"[index_ >> 1]; }
    constexpr bool clockwise() const { return (index_ & 1) == 0; }
    constexpr Move inverse() const { return Move(index_ ^ 1); }

    std::string str() const {
        std::string s(1, face());
        if (!clockwise()) s += '\'';
        return s;
    }

    friend constexpr bool operator==(Move a, Move b) { return a.index_ == b.index_; }
    friend constexpr bool operator!=(Move a, Move b) { return a.index_ != b.index_; }

private:
    std::uint8_t index_ = 0;
};

inline const std::array<Move, kNumMoves>& all_moves() {
    static const std::array<Move, kNumMoves> moves = [] {
        std::array<Move, kNumMoves> m{};
        for (int i = 0; i < kNumMoves; ++i) m[i] = Move(i);
        return m;
    }();
    return moves;
}

namespace detail {

// src[j] = facelet index whose sticker lands on position j.
// Derived from a 3D sticker model; validated by the group-invariant tests
// and by the BFS layer counts 1, 12, 114, 1068, 10011.
// clang-format off
inline constexpr std::uint8_t kMoveSrc[12][54] = {
    // U
    {6, 3, 0, 7, 4, 1, 8, 5, 2, 45, 46, 47, 12, 13, 14, 15, 16, 17, 9, 10, 11, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32, 33, 34, 35, 18, 19, 20, 39, 40, 41, 42, 43, 44, 36, 37, 38, 48, 49, 50, 51, 52, 53},
    // U'
    {2, 5, 8, 1, 4, 7, 0, 3, 6, 18, 19, 20, 12, 13, 14, 15, 16, 17, 36, 37, 38, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32, 33, 34, 35, 45, 46, 47, 39, 40, 41, 42, 43, 44, 9, 10, 11, 48, 49, 50, 51, 52, 53},
    // D
    {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 24, 25, 26, 18, 19, 20, 21, 22, 23, 42, 43, 44, 33, 30, 27, 34, 31, 28, 35, 32, 29, 36, 37, 38, 39, 40, 41, 51, 52, 53, 45, 46, 47, 48, 49, 50, 15, 16, 17},
    // D'
    {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 51, 52, 53, 18, 19, 20, 21, 22, 23, 15, 16, 17, 29, 32, 35, 28, 31, 34, 27, 30, 33, 36, 37, 38, 39, 40, 41, 24, 25, 26, 45, 46, 47, 48, 49, 50, 42, 43, 44},
    // L
    {53, 1, 2, 50, 4, 5, 47, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 0, 19, 20, 3, 22, 23, 6, 25, 26, 18, 28, 29, 21, 31, 32, 24, 34, 35, 42, 39, 36, 43, 40, 37, 44, 41, 38, 45, 46, 33, 48, 49, 30, 51, 52, 27},
    // L'
    {18, 1, 2, 21, 4, 5, 24, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 27, 19, 20, 30, 22, 23, 33, 25, 26, 53, 28, 29, 50, 31, 32, 47, 34, 35, 38, 41, 44, 37, 40, 43, 36, 39, 42, 45, 46, 6, 48, 49, 3, 51, 52, 0},
    // R
    {0, 1, 20, 3, 4, 23, 6, 7, 26, 15, 12, 9, 16, 13, 10, 17, 14, 11, 18, 19, 29, 21, 22, 32, 24, 25, 35, 27, 28, 51, 30, 31, 48, 33, 34, 45, 36, 37, 38, 39, 40, 41, 42, 43, 44, 8, 46, 47, 5, 49, 50, 2, 52, 53},
    // R'
    {0, 1, 51, 3, 4, 48, 6, 7, 45, 11, 14, 17, 10, 13, 16, 9, 12, 15, 18, 19, 2, 21, 22, 5, 24, 25, 8, 27, 28, 20, 30, 31, 23, 33, 34, 26, 36, 37, 38, 39, 40, 41, 42, 43, 44, 35, 46, 47, 32, 49, 50, 29, 52, 53},
    // F
    {0, 1, 2, 3, 4, 5, 44, 41, 38, 6, 10, 11, 7, 13, 14, 8, 16, 17, 24, 21, 18, 25, 22, 19, 26, 23, 20, 15, 12, 9, 30, 31, 32, 33, 34, 35, 36, 37, 27, 39, 40, 28, 42, 43, 29, 45, 46, 47, 48, 49, 50, 51, 52, 53},
    // F'
    {0, 1, 2, 3, 4, 5, 9, 12, 15, 29, 10, 11, 28, 13, 14, 27, 16, 17, 20, 23, 26, 19, 22, 25, 18, 21, 24, 38, 41, 44, 30, 31, 32, 33, 34, 35, 36, 37, 8, 39, 40, 7, 42, 43, 6, 45, 46, 47, 48, 49, 50, 51, 52, 53},
    // B
    {11, 14, 17, 3, 4, 5, 6, 7, 8, 9, 10, 35, 12, 13, 34, 15, 16, 33, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32, 36, 39, 42, 2, 37, 38, 1, 40, 41, 0, 43, 44, 51, 48, 45, 52, 49, 46, 53, 50, 47},
    // B'
    {42, 39, 36, 3, 4, 5, 6, 7, 8, 9, 10, 0, 12, 13, 1, 15, 16, 2, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32, 17, 14, 11, 33, 37, 38, 34, 40, 41, 35, 43, 44, 47, 50, 53, 46, 49, 52, 45, 48, 51},
};
// clang-format on

// Facelet positions displaced by each move (the 20 with src != identity).
inline const std::array<std::array<std::uint8_t, 20>, 12>& moved_positions() {
    static const auto table = [] {
        std::array<std::array<std::uint8_t, 20>, 12> t{};
        for (int m = 0; m < 12; ++m) {
            int k = 0;
            for (int j = 0; j < 54; ++j)
                if (kMoveSrc[m][j] != j) t[m][k++] = static_cast<std::uint8_t>(j);
        }
        return t;
    }();
    return table;
}

}  // namespace detail

// A cube configuration: one color code per facelet. Constructed states are
// always reachable from the solved state (moves are the only mutators).
struct CubeState {
    std::array<std::uint8_t, kNumFacelets> facelets{};

    friend bool operator==(const CubeState& a, const CubeState& b) {
        return a.facelets == b.facelets;
    }
    friend bool operator!=(const CubeState& a, const CubeState& b) {
        return !(a == b);
    }
};

inline CubeState solved_state() {
    CubeState s;
    for (int i = 0; i < kNumFacelets; ++i)
        s.facelets[i] = static_cast<std::uint8_t>(i / 9);
    return s;
}

inline CubeState apply_move(const CubeState& g, Move m) {
    const std::uint8_t* src = detail::kMoveSrc[m.index()];
    CubeState out;
    for (int j = 0; j < kNumFacelets; ++j) out.facelets[j] = g.facelets[src[j]];
    return out;
}

inline CubeState apply_moves(CubeState g, const std::vector<Move>& moves) {
    for (Move m : moves) g = apply_move(g, m);
    return g;
}

// The 12 one-move successors, in move-index order.
inline std::array<std::pair<Move, CubeState>, kNumMoves> neighbors(const CubeState& g) {
    std::array<std::pair<Move, CubeState>, kNumMoves> out;
    for (int i = 0; i < kNumMoves; ++i) out[i] = {Move(i), apply_move(g, Move(i))};
    return out;
}

inline std::vector<Move> invert_sequence(const std::vector<Move>& moves) {
    std::vector<Move> out;
    out.reserve(moves.size());
    for (auto it = moves.rbegin(); it != moves.rend(); ++it) out.push_back(it->inverse());
    return out;
}

// --- Singmaster scramble strings (quarter-turn subset) ---

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parses whitespace-separated tokens from {U,D,L,R,F,B} with optional '.
// Half-turn suffixes and anything else are rejected with token position.
inline std::vector<Move> parse_scramble(std::string_view text) {
    std::vector<Move> out;
    std::size_t pos = 0;
    int token_no = 0;
    while (pos < text.size()) {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' ||
                                     text[pos] == '\n' || text[pos] == '\r'))
            ++pos;
        if (pos >= text.size()) break;
        std::size_t end = pos;
        while (end < text.size() && text[end] != ' ' && text[end] != '\t' &&
               text[end] != '\n' && text[end] != '\r')
            ++end;
        std::string_view tok = text.substr(pos, end - pos);
        ++token_no;

        int face = -1;
        switch (tok[0]) {
            case 'U': face = 0; break;
            case 'D': face = 1; break;
            case 'L': face = 2; break;
            case 'R': face = 3; break;
            case 'F': face = 4; break;
            case 'B': face = 5; break;
            default: face = -1; break;
        }
        bool prime = tok.size() == 2 && tok[1] == '\'';
        if (face < 0 || (tok.size() > 1 && !prime)) {
            throw ParseError("unknown move token '" + std::string(tok) + "' at position " +
                             std::to_string(token_no));
        }
        out.push_back(Move(face * 2 + (prime ? 1 : 0)));
        pos = end;
    }
    return out;
}

inline std::string scramble_to_string(const std::vector<Move>& moves) {
    std::string s;
    for (std::size_t i = 0; i < moves.size(); ++i) {
        if (i) s += ' ';
        s += moves[i].str();
    }
    return s;
}

// --- 54-character facelet strings (human-readable external format) ---

inline std::string to_facelet_string(const CubeState& g) {
    std::string s(kNumFacelets, '?');
    for (int i = 0; i < kNumFacelets; ++i) s[i] = kColorChars[g.facelets[i]];
    return s;
}

inline void validate_facelets(const CubeState& g) {
    int counts[kNumColors] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < kNumFacelets; ++i) {
        if (g.facelets[i] >= kNumColors)
            throw ParseError("invalid color code " + std::to_string(g.facelets[i]) +
                             " at facelet " + std::to_string(i));
        ++counts[g.facelets[i]];
    }
    for (int c = 0; c < kNumColors; ++c) {
        if (counts[c] != 9)
            throw ParseError(std::string("expected 9 facelets of color ") + kColorChars[c] +
                             ", got " + std::to_string(counts[c]));
    }
    for (int f = 0; f < kNumColors; ++f) {
        if (g.facelets[9 * f + 4] != f)
            throw ParseError(std::string("center facelet of face ") + kColorChars[f] +
                             " must be " + kColorChars[f]);
    }
}

// Parses the 54-char URFDLB facelet string. Validates length, color letters,
// per-color counts and fixed centers; does NOT check group reachability.
inline CubeState state_from_facelets(std::string_view s) {
    if (s.size() != kNumFacelets)
        throw ParseError("facelet string must have 54 characters, got " +
                         std::to_string(s.size()));
    CubeState g;
    for (int i = 0; i < kNumFacelets; ++i) {
        int c = color_from_char(s[i]);
        if (c < 0)
            throw ParseError(std::string("unknown color character '") + s[i] +
                             "' at facelet " + std::to_string(i));
        g.facelets[i] = static_cast<std::uint8_t>(c);
    }
    validate_facelets(g);
    return g;
}

// --- Canonical packed key ---

// 54 facelets x 3 bits packed into three words; injective on valid states.
struct StateKey {
    std::uint64_t w0 = 0, w1 = 0, w2 = 0;

    friend bool operator==(const StateKey& a, const StateKey& b) {
        return a.w0 == b.w0 && a.w1 == b.w1 && a.w2 == b.w2;
    }
    friend bool operator!=(const StateKey& a, const StateKey& b) { return !(a == b); }
    friend bool operator<(const StateKey& a, const StateKey& b) {
        if (a.w0 != b.w0) return a.w0 < b.w0;
        if (a.w1 != b.w1) return a.w1 < b.w1;
        return a.w2 < b.w2;
    }
};

inline StateKey encode_state(const CubeState& g) {
    StateKey k;
    for (int i = 0; i < 21; ++i) k.w0 |= std::uint64_t(g.facelets[i]) << (3 * i);
    for (int i = 21; i < 42; ++i) k.w1 |= std::uint64_t(g.facelets[i]) << (3 * (i - 21));
    for (int i = 42; i < 54; ++i) k.w2 |= std::uint64_t(g.facelets[i]) << (3 * (i - 42));
    return k;
}

// Unpacks and validates a key. Rejects out-of-range color codes, stray high
// bits, wrong per-color counts and non-canonical centers; reachability is
// not verified (a documented limitation: parity errors pass through).
inline CubeState decode_state(const StateKey& k) {
    if ((k.w0 >> 63) != 0 || (k.w1 >> 63) != 0 || (k.w2 >> 36) != 0)
        throw ParseError("state key has stray bits beyond the 54 facelet fields");
    CubeState g;
    for (int i = 0; i < 21; ++i) g.facelets[i] = (k.w0 >> (3 * i)) & 7;
    for (int i = 21; i < 42; ++i) g.facelets[i] = (k.w1 >> (3 * (i - 21))) & 7;
    for (int i = 42; i < 54; ++i) g.facelets[i] = (k.w2 >> (3 * (i - 42))) & 7;
    validate_facelets(g);
    return g;
}

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct StateKeyHash {
    std::size_t operator()(const StateKey& k) const {
        std::uint64_t h = mix64(k.w0);
        h = mix64(h ^ k.w1);
        h = mix64(h ^ k.w2);
        return static_cast<std::size_t>(h);
    }
};

}  // namespace cubegnn

template <>
struct std::hash<cubegnn::StateKey> {
    std::size_t operator()(const cubegnn::StateKey& k) const {
        return cubegnn::StateKeyHash{}(k);
    }
};
