//! The surface language: tokens, AST, parser, printer and alpha-equivalence.

pub mod alpha;
pub mod ast;
pub mod generate;
pub mod lexer;
pub mod parser;
pub mod printer;

pub use alpha::{alpha_equal, alpha_equal_expressions, alpha_equal_functions};
pub use ast::*;
pub use parser::{
    parse_expression, parse_program, parse_program_with_spans, parse_type, ParseError,
};
pub use printer::{print_expression, print_program, print_toplevel, print_type};
