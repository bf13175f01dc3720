#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "pricelab/errors.hpp"
#include "pricelab/market_data.hpp"

using namespace pricelab;

namespace {

const char* kHeader = "date,kind,strike,expiry,bid,ask,volume,spot,rate,div_hist\n";

OptionQuote quote(int ttm, long long volume, double mid = 5.0) {
    return OptionQuote::make(OptionKind::Put, 100.0, Date(2012, 1, 3).plus_days(ttm), ttm, mid,
                             mid, volume);
}

DailyChain chain_of(std::vector<OptionQuote> quotes) {
    return {{Date(2012, 1, 3), 100.0, 0.01, 0.02}, std::move(quotes)};
}

}  // namespace

TEST_CASE("dates") {
    const Date d = Date::parse("2012-02-29");
    CHECK(d.iso() == "2012-02-29");
    CHECK(Date::parse("2012-03-01") - d == 1);
    CHECK(d.plus_days(366).iso() == "2013-03-01");
    CHECK_THROWS_AS(Date::parse("2011-02-29"), DomainError);
    CHECK_THROWS_AS(Date::parse("2012/01/03"), DomainError);
    CHECK_THROWS_AS(Date::parse("2012-1-3"), DomainError);
}

TEST_CASE("quotes group by date and sort") {
    const std::string csv = std::string(kHeader) +
                            "2012-01-04,P,1300,2012-02-18,10,11,500,1290,0.01,0.02\n"
                            "2012-01-03,P,1310,2012-02-18,12,13,500,1280,0.01,0.02\n"
                            "2012-01-03,C,1300,2012-02-18,1.0,2.0,500,1280,0.01,0.02\n";
    const auto chains = parse_chains(csv);
    REQUIRE(chains.size() == 2);
    CHECK(chains[0].env.date.iso() == "2012-01-03");
    CHECK(chains[0].quotes.size() == 2);
    CHECK(chains[1].quotes.size() == 1);
    CHECK(chains[0].quotes[0].kind == OptionKind::Call);
    CHECK(chains[0].quotes[0].mid == 1.5);
    CHECK(chains[0].quotes[0].ttm_days == 46);
    CHECK(chains[0].env.spot == 1280.0);
}

TEST_CASE("malformed rows report their line") {
    auto line_of = [](const std::string& body) -> std::size_t {
        try {
            parse_chains(std::string(kHeader) + body);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    const std::string good = "2012-01-03,P,1300,2012-02-18,10,11,500,1290,0.01,0.02\n";
    CHECK(line_of(good + "2012-01-03,P,1300,2012-02-18,1.0,0.5,500,1290,0.01,0.02\n") == 3);
    CHECK(line_of("2012-01-03,P,1300,2012-02-18,10,11,500,0,0.01,0.02\n") == 2);
    CHECK(line_of("2012-01-03,X,1300,2012-02-18,10,11,500,1290,0.01,0.02\n") == 2);
    CHECK(line_of("2012-01-03,P,abc,2012-02-18,10,11,500,1290,0.01,0.02\n") == 2);
    CHECK(line_of("2012-01-03,P,1300,2012-02-18,10,11,500,1290,0.01\n") == 2);
    CHECK(line_of(good + "2012-01-03,P,1305,2012-02-18,10,11,500,1291,0.01,0.02\n") == 3);
    CHECK_THROWS_AS(parse_chains("date,kind\n"), ParseError);
    CHECK_THROWS_AS(parse_chains(""), ParseError);
}

TEST_CASE("save and load round trip") {
    DailyChain a = chain_of({quote(30, 500, 4.25), quote(1, 100, 0.1)});
    a.quotes[1].kind = OptionKind::Call;
    a.quotes[0].implied_vol = 0.1234567890123;
    DailyChain b{{Date(2012, 1, 4), 1301.37, 0.0105, 0.0}, {quote(10, 7, 1.0 / 3.0)}};
    std::vector<DailyChain> chains{a, b};
    for (auto& c : chains) sort_quotes(c.quotes);

    const auto path = std::filesystem::temp_directory_path() / "pricelab_roundtrip.csv";
    save_chains(path, chains);
    const auto back = load_chains(path);
    std::filesystem::remove(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == chains[0]);
    CHECK(format_chains(back) == format_chains(chains));
    CHECK_THROWS_AS(load_chains(path), Error);
}

TEST_CASE("liquidity filter bounds are inclusive") {
    const auto c = chain_of({quote(0, 500), quote(5, 99), quote(1, 100), quote(40, 10000)});
    const auto f = filter_liquidity(c);
    REQUIRE(f.quotes.size() == 2);
    CHECK(f.quotes[0].ttm_days == 1);
    CHECK(f.quotes[1].ttm_days == 40);
    CHECK(filter_liquidity(f) == f);
}

TEST_CASE("trim on price and implied vol") {
    auto with_iv = [](OptionQuote q, std::optional<double> iv) {
        q.implied_vol = iv;
        return q;
    };
    const auto c = chain_of({with_iv(quote(30, 500, 0.10), 0.2), with_iv(quote(30, 500), 0.71),
                             with_iv(quote(30, 500), 0.70), with_iv(quote(30, 500), std::nullopt),
                             with_iv(quote(30, 500, 0.125), 0.3)});
    const auto r = trim(c);
    CHECK(r.chain.quotes.size() == 2);
    CHECK(r.removed_price == 1);
    CHECK(r.removed_iv == 1);
    CHECK(r.removed_missing_iv == 1);
    CHECK(trim(r.chain).chain == r.chain);
    CHECK(filter_liquidity(trim(c).chain) == trim(filter_liquidity(c)).chain);
}

TEST_CASE("quote invariants") {
    const Date e(2012, 2, 1);
    CHECK_THROWS_AS(OptionQuote::make(OptionKind::Put, 0.0, e, 3, 1, 2, 1), DomainError);
    CHECK_THROWS_AS(OptionQuote::make(OptionKind::Put, 10.0, e, -1, 1, 2, 1), DomainError);
    CHECK_THROWS_AS(OptionQuote::make(OptionKind::Put, 10.0, e, 3, 2, 1, 1), DomainError);
    CHECK_THROWS_AS(OptionQuote::make(OptionKind::Put, 10.0, e, 3, -1, 1, 1), DomainError);
    CHECK(parse_kind("call") == OptionKind::Call);
    CHECK(parse_kind("P") == OptionKind::Put);
    CHECK_THROWS_AS(parse_kind("straddle"), DomainError);
}

TEST_CASE("strike range and kind selection") {
    auto c = chain_of({quote(30, 500)});
    c.quotes.push_back(OptionQuote::make(OptionKind::Call, 80.0, Date(2012, 2, 2), 30, 1, 1, 500));
    c.quotes.push_back(OptionQuote::make(OptionKind::Call, 130.0, Date(2012, 2, 2), 30, 1, 1, 500));
    CHECK(strike_range(c) == std::pair{80.0, 130.0});
    CHECK(select_kind(c, OptionKind::Call).quotes.size() == 2);
    CHECK(price_points(c.quotes, OptionKind::Put).size() == 1);
}
