//! Text serialization of trained forests.
//!
//! ```text
//! botminer-forest 1
//! ntree 100
//! mtry 2
//! min_node_size 1
//! seed 42
//! features<TAB>name1<TAB>name2...
//! tree 0 7
//! S 1 2.5 12.75
//! L 0 4
//! ...
//! end
//! ```
//!
//! Each `tree i n` line is followed by its `n` nodes in preorder. `S feature
//! threshold decrease` is a split (left subtree follows immediately, then the
//! right); `L bot human` is a leaf with its class counts. Reals use Rust's
//! shortest round-trip formatting, so a saved model reloads bit-for-bit.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use botminer_core::forest::{DecisionTree, ForestConfig, Node, RandomForestModel};

use crate::error::{Error, Result};

const MAGIC: &str = "botminer-forest";
const VERSION: u32 = 1;

pub fn to_string(model: &RandomForestModel) -> String {
    let cfg = model.config();
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "ntree {}", cfg.ntree);
    let _ = writeln!(out, "mtry {}", cfg.mtry);
    let _ = writeln!(out, "min_node_size {}", cfg.min_node_size);
    let _ = writeln!(out, "seed {}", cfg.seed);
    out.push_str("features");
    for name in model.feature_names() {
        out.push('\t');
        out.push_str(name);
    }
    out.push('\n');
    for (i, tree) in model.trees().iter().enumerate() {
        let _ = writeln!(out, "tree {i} {}", tree.nodes().len());
        for node in tree.nodes() {
            match node {
                Node::Split { feature, threshold, decrease, .. } => {
                    let _ = writeln!(out, "S {feature} {threshold:?} {decrease:?}");
                }
                Node::Leaf { bot, human } => {
                    let _ = writeln!(out, "L {bot} {human}");
                }
            }
        }
    }
    out.push_str("end\n");
    out
}

pub fn save(model: &RandomForestModel, path: &Path) -> Result<()> {
    let mut out = crate::io::open_output(Some(path))?;
    out.write_all(to_string(model).as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<RandomForestModel> {
    let text = crate::io::read_to_string(path)?;
    from_str(&text, &path.display().to_string())
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    what: &'a str,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l)
            }
            None => Err(self.err("unexpected end of file")),
        }
    }

    fn err(&self, message: &str) -> Error {
        Error::format(self.what, self.line, message)
    }

    fn keyed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let line = self.next()?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| self.err(&format!("expected `{key} <value>`")))
    }
}

fn field<T: std::str::FromStr>(lines: &Lines<'_>, parts: &[&str], i: usize) -> Result<T> {
    parts
        .get(i)
        .and_then(|p| p.parse().ok())
        .ok_or_else(|| lines.err("bad node field"))
}

pub fn from_str(text: &str, what: &str) -> Result<RandomForestModel> {
    let mut lines = Lines { inner: text.lines().enumerate(), what, line: 0 };
    let magic = lines.next()?;
    if magic != format!("{MAGIC} {VERSION}") {
        return Err(lines.err("not a botminer-forest version 1 file"));
    }
    let config = ForestConfig {
        ntree: lines.keyed("ntree")?,
        mtry: lines.keyed("mtry")?,
        min_node_size: lines.keyed("min_node_size")?,
        seed: lines.keyed("seed")?,
    };
    let names_line = lines.next()?;
    let mut names = names_line.split('\t');
    if names.next() != Some("features") {
        return Err(lines.err("expected features line"));
    }
    let feature_names: Vec<String> = names.map(String::from).collect();

    let mut trees = Vec::with_capacity(config.ntree);
    loop {
        let line = lines.next()?;
        if line == "end" {
            break;
        }
        let parts: Vec<&str> = line.split(' ').collect();
        if parts.len() != 3 || parts[0] != "tree" || parts[1].parse() != Ok(trees.len()) {
            return Err(lines.err("expected `tree <index> <node count>`"));
        }
        let count: usize = field(&lines, &parts, 2)?;
        let mut raw = Vec::with_capacity(count);
        for _ in 0..count {
            let line = lines.next()?;
            let parts: Vec<&str> = line.split(' ').collect();
            let node = match (parts.first().copied(), parts.len()) {
                (Some("S"), 4) => Node::Split {
                    feature: field(&lines, &parts, 1)?,
                    threshold: field(&lines, &parts, 2)?,
                    right: 0,
                    decrease: field(&lines, &parts, 3)?,
                },
                (Some("L"), 3) => Node::Leaf {
                    bot: field(&lines, &parts, 1)?,
                    human: field(&lines, &parts, 2)?,
                },
                _ => return Err(lines.err("expected `S feature threshold decrease` or `L bot human`")),
            };
            raw.push(node);
        }
        let nodes = link_preorder(raw).ok_or_else(|| lines.err("node list is not a complete preorder tree"))?;
        trees.push(DecisionTree::from_nodes(nodes, feature_names.len())?);
    }
    Ok(RandomForestModel::from_parts(trees, config, feature_names)?)
}

/// Fills in right-child indices of a preorder node list.
fn link_preorder(mut nodes: Vec<Node>) -> Option<Vec<Node>> {
    // Splits still waiting for their left subtree to finish.
    let mut open: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        match nodes[i] {
            Node::Split { .. } => open.push(i),
            Node::Leaf { .. } => {
                // A finished left subtree hands the next slot to the
                // innermost open split as its right child.
                if let Some(parent) = open.pop() {
                    if i + 1 == nodes.len() {
                        return None;
                    }
                    if let Node::Split { right, .. } = &mut nodes[parent] {
                        *right = i + 1;
                    }
                } else if i + 1 != nodes.len() {
                    return None;
                }
            }
        }
        i += 1;
    }
    open.is_empty().then_some(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use botminer_core::forest::{Dataset, Label};

    fn model() -> RandomForestModel {
        let rows = (0..30).map(|i| {
            let x = [i as f64 * 0.37, (i % 7) as f64 / 3.0];
            (x, if i % 3 == 0 { Label::Bot } else { Label::Human })
        });
        let data = Dataset::from_rows(2, rows).unwrap();
        let cfg = ForestConfig { ntree: 5, mtry: 1, min_node_size: 1, seed: 11 };
        RandomForestModel::fit(&data, cfg, vec!["a".into(), "b c".into()]).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let m = model();
        let text = to_string(&m);
        let back = from_str(&text, "mem").unwrap();
        assert_eq!(back, m);
        assert_eq!(to_string(&back), text);
    }

    #[test]
    fn rejects_damage() {
        let text = to_string(&model());
        assert!(from_str(&text.replace("botminer-forest 1", "botminer-forest 2"), "m").is_err());
        assert!(from_str(&text.replace("\nend\n", "\n"), "m").is_err());
        let first_leaf = text.find("\nL ").unwrap();
        let mut cut = text.clone();
        cut.insert_str(first_leaf + 1, "L 1 1\n");
        assert!(from_str(&cut, "m").is_err());
    }

    #[test]
    fn link_preorder_shapes() {
        let l = Node::Leaf { bot: 1, human: 0 };
        let s = Node::Split { feature: 0, threshold: 0.0, right: 0, decrease: 0.0 };
        let linked = link_preorder(vec![s, s, l, l, l]).unwrap();
        assert!(matches!(linked[0], Node::Split { right: 4, .. }));
        assert!(matches!(linked[1], Node::Split { right: 3, .. }));
        assert!(link_preorder(vec![s, l]).is_none());
        assert!(link_preorder(vec![l, l]).is_none());
    }
}
