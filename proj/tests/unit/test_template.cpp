#include "doctest.h"
#include "fixtures.hpp"
#include "vpd/parse.hpp"
#include "vpd/print.hpp"
#include "vpd/template.hpp"

using namespace vpd;

namespace {

std::string renamed(const std::string& src) { return print_canonical(rename_variables(parse(src))); }

}  // namespace

TEST_CASE("rename_variables: dog program") {
  CHECK(renamed(fixtures::kDogProgram) ==
        "image_patch=ImagePatch(image)\nvar1=image_patch.find('dog')\nanswer=var1.classify('color')");
}

TEST_CASE("rename_variables: for loop target becomes temp_var") {
  const std::string src =
      "image_patch = ImagePatch(image)\n"
      "patches = image_patch.find('dog')\n"
      "total = 0\n"
      "for patch in patches:\n"
      "    legs = patch.find('leg')\n"
      "    total = total + len(legs)\n"
      "answer = str(total)";
  CHECK(renamed(src) ==
        "image_patch=ImagePatch(image)\n"
        "var1=image_patch.find('dog')\n"
        "var2=0\n"
        "for temp_var_1 in var1:\n"
        "    var3=temp_var_1.find('leg')\n"
        "    var2=var2 + len(var3)\n"
        "answer=str(var2)");
}

TEST_CASE("rename_variables: comprehension target") {
  const std::string src =
      "image_patch = ImagePatch(image)\n"
      "dogs = image_patch.find('dog')\n"
      "brown = [d for d in dogs if d.verify_property('brown')]\n"
      "answer = bool_to_yesno(len(brown) > 0)";
  CHECK(renamed(src) ==
        "image_patch=ImagePatch(image)\n"
        "var1=image_patch.find('dog')\n"
        "var2=[temp_var_1 for temp_var_1 in var1 if temp_var_1.verify_property('brown')]\n"
        "answer=bool_to_yesno(len(var2) > 0)");
}

TEST_CASE("rename_variables: with target") {
  const std::string src =
      "image_patch = ImagePatch(image)\n"
      "with image_patch.crop_position('left', image_patch) as left:\n"
      "    cars = image_patch.find('car')\n"
      "    n = len(cars)\n"
      "answer = str(n)";
  CHECK(renamed(src) ==
        "image_patch=ImagePatch(image)\n"
        "with image_patch.crop_position('left', image_patch) as temp_var_1:\n"
        "    var1=image_patch.find('car')\n"
        "    var2=len(var1)\n"
        "answer=str(var2)");
}

TEST_CASE("rename_variables: idempotent and skip-set aware") {
  const Program once = rename_variables(parse(fixtures::kSameColorProgram));
  CHECK(rename_variables(once) == once);
  const Program kept = rename_variables(parse(fixtures::kDogProgram), {"image_patch", "answer", "dog"});
  CHECK(print_canonical(kept).find("dog=image_patch.find('dog')") != std::string::npos);
}

TEST_CASE("extract: same-color program") {
  const TemplateRecord r = extract(fixtures::kSameColorQuestion, fixtures::kSameColorProgram, "q1");
  CHECK(r.tmpl.slot_count() == 4);
  CHECK(r.args.values == std::vector<std::string>{"cat", "color", "tshirt", "color"});
  CHECK(r.args.link_groups == std::vector<std::vector<std::size_t>>{{0}, {1, 3}, {2}});
  CHECK(r.tmpl.signature() ==
        std::vector<std::string>{"ImagePatch", "find", "classify", "find", "classify", "bool_to_yesno"});
  CHECK(r.tmpl.text() ==
        "image_patch=ImagePatch(image)\n"
        "var1=image_patch.find('<arg_0>')[0]\n"
        "var2=var1.classify('<arg_1>')\n"
        "var3=image_patch.find('<arg_2>')[0]\n"
        "var4=var3.classify('<arg_3>')\n"
        "answer=bool_to_yesno(var2 == var4)");
  CHECK(r.tmpl.id().rfind("t", 0) == 0);
  CHECK(r.tmpl.id().size() == 17);
}

TEST_CASE("extract: single-slot query and identical structure share a template") {
  const auto a = extract("q", "image_patch = ImagePatch(image)\nanswer = image_patch.simple_query('Who is riding?')");
  CHECK(a.tmpl.slot_count() == 1);
  const auto b = extract("q", "p = ImagePatch(image)\nanswer = p.simple_query('What is it?')");
  CHECK_FALSE(a.tmpl == b.tmpl);  // image_patch is never renamed; p becomes var1
  const auto c = extract("q", "image_patch = ImagePatch(image)\nanswer = image_patch.simple_query('x')");
  CHECK(a.tmpl == c.tmpl);
  CHECK(a.tmpl.id() == c.tmpl.id());
}

TEST_CASE("instantiate: fills slots and checks arity") {
  const TemplateRecord r = extract(fixtures::kSameColorQuestion, fixtures::kSameColorProgram);
  const std::string out = instantiate(r.tmpl, std::vector<std::string>{"vase", "shape", "table", "shape"});
  CHECK(out ==
        "image_patch=ImagePatch(image)\n"
        "var1=image_patch.find('vase')[0]\n"
        "var2=var1.classify('shape')\n"
        "var3=image_patch.find('table')[0]\n"
        "var4=var3.classify('shape')\n"
        "answer=bool_to_yesno(var2 == var4)");
  CHECK(instantiate(r.tmpl, r.args) == print_canonical(rename_variables(parse(fixtures::kSameColorProgram))));
  CHECK_THROWS_AS(instantiate(r.tmpl, std::vector<std::string>{"a", "b", "c"}), ArityMismatch);
}

TEST_CASE("instantiate: values with quotes stay parseable") {
  const auto r = extract("q", fixtures::kDogProgram);
  const std::string out = instantiate(r.tmpl, std::vector<std::string>{"it's", "a\\b"});
  const Program p = parse(out);
  CHECK(p.statements[1].as<Assign>().value.as<MethodCall>().args[0].as<Str>().value == "it's");
}

TEST_CASE("ArgBinding::from_values groups equal values") {
  const auto b = ArgBinding::from_values({"x", "y", "x", "z", "y"});
  CHECK(b.link_groups == std::vector<std::vector<std::size_t>>{{0, 2}, {1, 4}, {3}});
  CHECK(placeholder(3) == "<arg_3>");
}
