//! Pascal VOC annotation files.

use std::fmt::Write as _;

use roxmltree::{Document, Node};

use crate::error::DatasetError;
use crate::model::{AnnotationRecord, BoundingBox};

/// All annotations of one image.
#[derive(Debug, Clone, PartialEq)]
pub struct VocDocument {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub objects: Vec<AnnotationRecord>,
    /// Number of objects whose box had to be clamped into the image.
    pub clamped: usize,
}

fn child<'a, 'i>(node: Node<'a, 'i>, name: &str) -> Option<Node<'a, 'i>> {
    node.children().find(|n| n.has_tag_name(name))
}

fn text_of<'a>(node: Node<'a, '_>, name: &'static str) -> Result<&'a str, DatasetError> {
    child(node, name)
        .and_then(|n| n.text())
        .map(str::trim)
        .ok_or(DatasetError::Missing(name))
}

fn number(node: Node<'_, '_>, name: &'static str) -> Result<f64, DatasetError> {
    let raw = text_of(node, name)?;
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| DatasetError::Value {
            field: name,
            value: raw.to_string(),
        })
}

fn dimension(node: Node<'_, '_>, name: &'static str) -> Result<u32, DatasetError> {
    let v = number(node, name)?;
    if v < 1.0 || v.fract() != 0.0 || v > f64::from(u32::MAX) {
        return Err(DatasetError::Value {
            field: name,
            value: v.to_string(),
        });
    }
    Ok(v as u32)
}

/// Parses one VOC XML document. Corner boxes become (x, y, w, h); boxes that
/// stick out of the image are clamped and counted in [`VocDocument::clamped`].
pub fn parse_voc(xml: &str) -> Result<VocDocument, DatasetError> {
    let doc = Document::parse(xml).map_err(|e| DatasetError::Xml(e.to_string()))?;
    let root = doc.root_element();
    let image_id = child(root, "filename")
        .and_then(|n| n.text())
        .unwrap_or("")
        .trim()
        .to_string();
    let size = child(root, "size").ok_or(DatasetError::Missing("size"))?;
    let width = dimension(size, "width")?;
    let height = dimension(size, "height")?;

    let mut objects = Vec::new();
    let mut clamped = 0;
    for (index, obj) in root
        .children()
        .filter(|n| n.has_tag_name("object"))
        .enumerate()
    {
        let bndbox = child(obj, "bndbox").ok_or(DatasetError::Missing("bndbox"))?;
        let (x0, y0) = (number(bndbox, "xmin")?, number(bndbox, "ymin")?);
        let (x1, y1) = (number(bndbox, "xmax")?, number(bndbox, "ymax")?);
        if x1 <= x0 || y1 <= y0 {
            return Err(DatasetError::InvertedBox { index });
        }
        let difficult = match child(obj, "difficult")
            .and_then(|n| n.text())
            .map(str::trim)
        {
            None | Some("") | Some("0") => false,
            Some("1") => true,
            Some(other) => {
                return Err(DatasetError::Value {
                    field: "difficult",
                    value: other.to_string(),
                })
            }
        };
        let bbox = BoundingBox::from_corners(x0, y0, x1, y1)
            .map_err(|source| DatasetError::Object { index, source })?;
        let (record, changed) =
            AnnotationRecord::clamped(image_id.clone(), width, height, bbox, difficult)
                .map_err(|source| DatasetError::Object { index, source })?;
        if changed {
            log::warn!("{image_id}: object {index} clamped into {width}x{height}");
            clamped += 1;
        }
        objects.push(record);
    }
    Ok(VocDocument {
        image_id,
        width,
        height,
        objects,
        clamped,
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Serializes a document in VOC layout. Coordinates are written with the
/// shortest representation that parses back to the same value.
pub fn write_voc(doc: &VocDocument) -> String {
    let mut out = String::new();
    out.push_str("<annotation>\n");
    let _ = writeln!(out, "\t<filename>{}</filename>", escape(&doc.image_id));
    let _ = writeln!(
        out,
        "\t<size>\n\t\t<width>{}</width>\n\t\t<height>{}</height>\n\t\t<depth>1</depth>\n\t</size>",
        doc.width, doc.height
    );
    for rec in &doc.objects {
        let b = &rec.bbox;
        let _ = writeln!(
            out,
            "\t<object>\n\t\t<name>drone</name>\n\t\t<difficult>{}</difficult>\n\t\t<bndbox>\n\t\t\t<xmin>{}</xmin>\n\t\t\t<ymin>{}</ymin>\n\t\t\t<xmax>{}</xmax>\n\t\t\t<ymax>{}</ymax>\n\t\t</bndbox>\n\t</object>",
            u8::from(rec.difficult),
            b.x(),
            b.y(),
            b.right(),
            b.bottom()
        );
    }
    out.push_str("</annotation>\n");
    out
}
