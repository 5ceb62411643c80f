#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "vpd/parse.hpp"
#include "vpd/print.hpp"
#include "vpd/slots.hpp"

using namespace vpd;
namespace b = vpd::build;

TEST_CASE("parse: dog program has three assignments") {
  const Program p = parse(fixtures::kDogProgram);
  REQUIRE(p.statements.size() == 3);
  for (const auto& s : p.statements) CHECK(s.is<Assign>());
  const auto& find = p.statements[1].as<Assign>().value;
  REQUIRE(find.is<MethodCall>());
  CHECK(find.as<MethodCall>().method == "find");
  CHECK(p.statements[2].as<Assign>().value.as<MethodCall>().method == "classify");
}

TEST_CASE("parse: empty input") {
  CHECK(parse("").statements.empty());
  CHECK(parse("\n\n").statements.empty());
}

TEST_CASE("parse: seven statements with loop and comprehension match a hand-built tree") {
  const std::string src =
      "image_patch = ImagePatch(image)\n"
      "dogs = image_patch.find('dog')\n"
      "count = 0\n"
      "for dog in dogs:\n"
      "    count = count + 1\n"
      "brown = [d for d in dogs if d.verify_property('brown')]\n"
      "ratio = count - len(brown)\n"
      "answer = str(ratio)";

  Program expected;
  auto& st = expected.statements;
  st.push_back(b::assign("image_patch", b::call("ImagePatch", [] {
                           std::vector<Expr> a;
                           a.push_back(b::name("image"));
                           return a;
                         }())));
  {
    std::vector<Expr> a;
    a.push_back(b::str("dog"));
    st.push_back(b::assign("dogs", b::method(b::name("image_patch"), "find", std::move(a))));
  }
  st.push_back(b::assign("count", b::integer(0)));
  {
    std::vector<Stmt> body;
    body.push_back(b::assign("count", b::arith(b::name("count"), ArithOp::Add, b::integer(1))));
    st.push_back(b::for_loop(b::target("dog"), b::name("dogs"), std::move(body)));
  }
  {
    std::vector<Expr> a;
    a.push_back(b::str("brown"));
    std::vector<Expr> conds;
    conds.push_back(b::method(b::name("d"), "verify_property", std::move(a)));
    std::vector<Generator> gens;
    gens.push_back(b::generator(b::target("d"), b::name("dogs"), std::move(conds)));
    st.push_back(b::assign("brown", b::comprehension(CompKind::List, b::name("d"), std::move(gens))));
  }
  {
    std::vector<Expr> a;
    a.push_back(b::name("brown"));
    st.push_back(b::assign("ratio", b::arith(b::name("count"), ArithOp::Sub, b::call("len", std::move(a)))));
  }
  {
    std::vector<Expr> a;
    a.push_back(b::name("ratio"));
    st.push_back(b::assign("answer", b::call("str", std::move(a))));
  }

  const Program got = parse(src);
  CHECK(got.statements.size() == 7);
  CHECK(got == expected);
}

TEST_CASE("parse: errors carry a position") {
  auto position = [](const std::string& src) {
    try {
      parse(src);
    } catch (const SyntaxError& e) {
      return std::make_pair(e.line(), e.column());
    }
    return std::make_pair(0, 0);
  };
  CHECK(position("answer = (") == std::make_pair(1, 11));
  CHECK(position("x = 1\n  y = 2") == std::make_pair(2, 3));
  CHECK(position("def f():\n    x = 1").first == 1);
  CHECK(position("for x in y:\n\tz = 1").first == 2);
  CHECK(position("x = f(a=1)").first == 1);
  CHECK(position("x = 'open").first == 1);
}

TEST_CASE("parse: quoting forms and escapes") {
  const Program p = parse("x = f(\"it's\", 'say \"hi\"', 'a\\nb')");
  const auto& args = p.statements[0].as<Assign>().value.as<Call>().args;
  CHECK(args[0].as<Str>().value == "it's");
  CHECK(args[1].as<Str>().value == "say \"hi\"");
  CHECK(args[2].as<Str>().value == "a\nb");
}

TEST_CASE("print_canonical: tight single-line assignment") {
  Program p;
  std::vector<Expr> args;
  args.push_back(b::compare(b::name("var2"), CmpOp::Eq, b::name("var4")));
  p.statements.push_back(b::assign("answer", b::call("bool_to_yesno", std::move(args))));
  CHECK(print_canonical(p) == "answer=bool_to_yesno(var2 == var4)");
  CHECK(print_canonical(Program{}).empty());
}

TEST_CASE("print_canonical: blocks use four-space indentation") {
  const std::string src = "for x in xs:\n    y = x\nelse:\n    z = 1\nwhile a:\n    b = 2";
  const std::string printed = print_canonical(parse(src));
  CHECK(printed == "for x in xs:\n    y=x\nelse:\n    z=1\nwhile a:\n    b=2");
}

TEST_CASE("print_canonical: round trip on a few hundred random programs") {
  oracle::RandomProgram gen(11);
  for (int i = 0; i < 300; ++i) {
    const Program p = gen.next();
    const std::string text = print_canonical(p);
    INFO(text);
    CHECK(parse(text) == p);
    CHECK(print_canonical(parse(text)) == text);
  }
}

TEST_CASE("string_literal_slots: argument strings in source order") {
  auto values = [](const std::string& src) {
    std::vector<std::string> v;
    for (const auto& s : string_literal_slots(parse(src))) v.push_back(s.value);
    return v;
  };
  CHECK(values(fixtures::kDogProgram) == std::vector<std::string>{"dog", "color"});
  CHECK(values(fixtures::kSameColorProgram) == std::vector<std::string>{"cat", "color", "tshirt", "color"});
  CHECK(values("x = f(y)\nanswer = str(x)").empty());
  CHECK(values("a = p.classify(['red', 'blue'])\nb = 'not an argument'") ==
        std::vector<std::string>{"red", "blue"});
}

TEST_CASE("string_literal_slots: paths are unique and survive substitution") {
  const Program p = parse(fixtures::kSameColorProgram);
  const auto slots = string_literal_slots(p);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    for (std::size_t j = i + 1; j < slots.size(); ++j) CHECK(slots[i].path != slots[j].path);
  }
  const Program q = substitute_slots(p, {"vase", "shape", "table", "shape"});
  const auto after = string_literal_slots(q);
  REQUIRE(after.size() == 4);
  CHECK(after[0].value == "vase");
  CHECK(after[0].path == slots[0].path);
  CHECK_THROWS_AS(substitute_slots(p, {"one"}), std::invalid_argument);
}

TEST_CASE("call_signature lists calls in order") {
  CHECK(call_signature(parse(fixtures::kSameColorProgram)) ==
        std::vector<std::string>{"ImagePatch", "find", "classify", "find", "classify", "bool_to_yesno"});
}
