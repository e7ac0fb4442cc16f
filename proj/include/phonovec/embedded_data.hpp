#pragma once

#include <string_view>

// Text of the data files shipped under data/, compiled into the library.
namespace phonovec::embedded {

std::string_view panphon_table();
std::string_view timit_diphthongs();
std::string_view timit_closure_merge();
std::string_view timit_ipa_map();

}  // namespace phonovec::embedded
