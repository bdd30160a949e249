//! Writing and reading the stream text format.

use streammatch::gen::gen_upper_triangular;
use streammatch::{parse_stream, write_stream, OrderPolicy};

fn main() -> streammatch::Result<()> {
    let s = gen_upper_triangular(4)?.stream.reordered(OrderPolicy::Reverse, 0);
    let text = write_stream(&s);
    print!("{}", String::from_utf8_lossy(&text));
    assert_eq!(parse_stream(&text)?, s);

    match parse_stream(b"p 2 2\nv 0 0 0\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
