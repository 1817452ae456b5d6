#pragma once

// Minimal deterministic JSON writer: fixed key order comes from call order,
// floating point values printed with 12 significant digits.

#include <cstdio>
#include <string>
#include <vector>

namespace sepstab::jsonfmt {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

class Writer {
public:
    void begin_obj() { open('{'); }
    void end_obj() { close('}'); }
    void begin_arr() { open('['); }
    void end_arr() { close(']'); }

    void key(const std::string& k) {
        comma();
        indent();
        s_ += '"';
        s_ += escape(k);
        s_ += "\": ";
        pending_key_ = true;
    }

    void str(const std::string& v) { scalar('"' + escape(v) + '"'); }
    void num(double v) { scalar(fmt_double(v)); }
    void integer(long long v) { scalar(std::to_string(v)); }
    void uinteger(unsigned long long v) { scalar(std::to_string(v)); }
    void boolean(bool v) { scalar(v ? "true" : "false"); }

    std::string take() {
        s_ += '\n';
        return std::move(s_);
    }

private:
    void open(char c) {
        if (!pending_key_) {
            comma();
            indent();
        }
        pending_key_ = false;
        s_ += c;
        first_.push_back(true);
    }

    void close(char c) {
        first_.pop_back();
        s_ += '\n';
        for (std::size_t i = 0; i < first_.size(); ++i) s_ += "  ";
        s_ += c;
        if (!first_.empty()) first_.back() = false;
    }

    void scalar(const std::string& text) {
        if (!pending_key_) {
            comma();
            indent();
        }
        pending_key_ = false;
        s_ += text;
        if (!first_.empty()) first_.back() = false;
    }

    void comma() {
        if (!first_.empty() && !first_.back()) s_ += ',';
    }

    void indent() {
        if (first_.empty()) return;
        s_ += '\n';
        for (std::size_t i = 0; i < first_.size(); ++i) s_ += "  ";
    }

    std::string s_;
    std::vector<bool> first_;
    bool pending_key_ = false;
};

} // namespace sepstab::jsonfmt
