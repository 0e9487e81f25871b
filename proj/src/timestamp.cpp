#include <cctype>
#include <charconv>
#include <chrono>
#include <stdexcept>
#include <string>

#include "dbrd/corpus.hpp"

namespace dbrd {

namespace {

class Cursor {
  public:
    explicit Cursor(std::string_view text) : text_(text) {}

    bool done() const { return pos_ >= text_.size(); }
    char peek() const { return done() ? '\0' : text_[pos_]; }

    int digits(std::size_t count) {
        if (pos_ + count > text_.size()) fail();
        int value = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + pos_ + count, value);
        if (ec != std::errc{} || ptr != text_.data() + pos_ + count) fail();
        pos_ += count;
        return value;
    }

    void expect(char c) {
        if (peek() != c) fail();
        ++pos_;
    }

    bool accept(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }

    /// Fractional seconds as milliseconds; extra digits are truncated.
    int fraction_ms() {
        int ms = 0;
        int scale = 100;
        std::size_t n = 0;
        while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) {
            ms += (peek() - '0') * scale;
            scale /= 10;
            ++pos_;
            ++n;
        }
        if (n == 0) fail();
        return ms;
    }

    [[noreturn]] void fail() const {
        throw std::invalid_argument("malformed timestamp '" + std::string(text_) + "'");
    }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);

    Cursor in(text);
    const int y = in.digits(4);
    in.expect('-');
    const int mo = in.digits(2);
    in.expect('-');
    const int d = in.digits(2);

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) in.fail();

    std::int64_t ms = duration_cast<milliseconds>(sys_days{ymd}.time_since_epoch()).count();
    if (in.done()) return ms;

    if (!in.accept('T') && !in.accept(' ')) in.fail();
    const int hh = in.digits(2);
    in.expect(':');
    const int mm = in.digits(2);
    int ss = 0;
    if (in.accept(':')) {
        ss = in.digits(2);
        if (in.accept('.') || in.accept(',')) ms += in.fraction_ms();
    }
    if (hh > 23 || mm > 59 || ss > 60) in.fail();
    ms += ((hh * 60LL + mm) * 60LL + ss) * 1000LL;

    if (in.done() || in.accept('Z')) {
        if (!in.done()) in.fail();
        return ms;
    }
    int sign = 0;
    if (in.accept('+')) sign = 1;
    else if (in.accept('-')) sign = -1;
    else in.fail();
    const int oh = in.digits(2);
    in.accept(':');
    const int om = in.digits(2);
    if (!in.done()) in.fail();
    return ms - sign * ((oh * 60LL + om) * 60'000LL);
}

}  // namespace dbrd
